"""Phase-addressed XY gate family for parametrically coupled transmons.

Submodules: ``qcore`` (gates and circuits), ``frames`` (rotating-frame bookkeeping),
``pulsesim`` (time-domain pulse model), ``decomp`` (composite-pulse compiler),
``calib`` (simulated phase calibration), ``bench`` (noise, Cliffords, iRB) and
``qaoa`` (MaxCut routing and landscapes).
"""
__version__ = "0.1.0"
