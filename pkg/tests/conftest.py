import os

from hypothesis import HealthCheck, settings

# JIT compilation makes the first example slow; deadlines would be noise.
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))
