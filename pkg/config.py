from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", env_prefix="MERSENNE_"
    )

    log_level: str = "INFO"
    seed: int = 2024

    # Arithmetic
    default_prime_exponent: int = 61
    native_max_bits: int = 61  # moduli up to this width use Python ints, wider ones use UWide limbs
    hash_finish: Literal["subtract", "branchfree"] = "subtract"

    # Benchmarks
    bench_warmup: int = 3
    bench_repetitions: int = 5
    bench_pool_size: int = 65536  # pre-generated inputs cycled through by the hot loop
    bench_n: int = 100_000
    output_format: Literal["json", "csv"] = "json"
    results_dir: str = "results"

    # Count Sketch
    sketch_width: int = 1024
    sketch_rows: int = 1
    sketch_log_u: int = 32
    sketch_splitter: Literal["pow2", "uniform-arb", "mersenne-arb"] = "pow2"
    sketch_dir: str = "sketches"
    f2_median: bool = False  # single row for F2 unless asked, median for point queries

    # Verification
    enumeration_budget_seconds: float = 120.0  # per suite
    max_enumeration_work: int = 1 << 23  # hash evaluations per enumeration
    enumeration_chunk: int = 262_144
    verify_fuzz_trials: int = 1_000_000
    verify_limb_sample: int = 64  # every n-th fuzz trial is repeated on UWide limbs


settings = Settings()
