"""Watermark-driven detection of filming over encrypted FPV video links.

Thin re-export of the compiled core. The typical round trip:

    import fpvwm

    preset = fpvwm.find_preset("house")
    schedule = preset.schedule()
    trace = fpvwm.simulate_trace(preset.scenario, schedule, 46_000, seed=7)
    series = fpvwm.extract_bitrate_array(trace)
    result = fpvwm.under_detection(series, schedule)
    assert result.detected
"""

from fpvwm._core import *  # noqa: F401,F403
from fpvwm._core import __version__  # noqa: F401
