import numpy as np


def assert_kkt(gains, allocation, total_power, noise_var):
    """Water-filling optimality: budget, common level, complementary slackness."""
    gains = np.asarray(gains, dtype=float)
    allocation = np.asarray(allocation, dtype=float)
    assert np.all(allocation >= 0.0)
    assert allocation[gains == 0.0].sum() == 0.0
    assert abs(allocation.sum() - total_power) <= 1e-10 * total_power
    active = allocation > 0.0
    assert active.any()
    levels = allocation[active] + noise_var / gains[active]
    mu = levels.max()
    assert np.all(np.abs(levels - mu) <= 1e-9)
    inactive = (~active) & (gains > 0.0)
    assert np.all(noise_var / gains[inactive] >= mu - 1e-9)
