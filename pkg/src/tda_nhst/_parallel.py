import os

ENV_THREADS = "TDA_NHST_THREADS"


def effective_n_jobs(n_jobs=None):
    """Resolve a worker count, honouring ``TDA_NHST_THREADS`` as a cap.

    ``None`` defers to the environment variable (``0`` or unset means one
    worker per CPU when ``n_jobs`` is ``-1``, otherwise a single worker).
    """
    cpus = os.cpu_count() or 1
    env = os.environ.get(ENV_THREADS, "").strip()
    cap = int(env) if env else 0
    if cap < 0:
        raise ValueError(f"{ENV_THREADS} must be >= 0, got {cap}")
    if n_jobs is None:
        n_jobs = cap if cap > 0 else 1
    elif n_jobs < 0:
        n_jobs = max(1, cpus + 1 + n_jobs)
    elif n_jobs == 0:
        n_jobs = cpus
    if cap > 0:
        n_jobs = min(n_jobs, cap)
    return max(1, int(n_jobs))
