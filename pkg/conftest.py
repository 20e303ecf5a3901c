import sys
from pathlib import Path

_SRC = Path(__file__).parent / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

try:
    from hypothesis import HealthCheck, settings

    settings.register_profile(
        "repo",
        derandomize=True,
        max_examples=200,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("repo")
except ImportError:
    pass
