import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# The 13-letter worked example of the antigravity construction.
WORKED_SEQ = (0, 1, -3, -4, -1, 2, 5, 2, 1, 0, -2, 2, -1)
WINDOW = (0, 1, 2, 3)
