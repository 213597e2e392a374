"""
Radial-path phase tracking.

A zero-free function on the disc has continuous branches of log and sqrt. Along
the segment [0, z] they are recovered from sampled values, provided consecutive
samples are close enough in phase that the principal value of each ratio is the
right one. Nodes are bisected until every step turns by less than a quarter turn.
"""

import logging
import math

import numpy as np

import ovbound.exception as exception

logger = logging.getLogger(__name__)

PHASE_CAP = math.pi / 2
INITIAL_STEPS = 64
MAX_STEPS = 2 ** 16

def _phase_steps(values):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.angle(values[..., 1:] / values[..., :-1])

def _vanished(values, floor):
    magnitude = np.abs(values)

    return ~np.isfinite(values) | (magnitude == 0.0) | (magnitude < floor)

def radial_refine(sample, z, *, initial_steps=INITIAL_STEPS, max_steps=MAX_STEPS, floor=0.0,
                  vanish_exception=exception.BranchContinuationException):
    """
    Returns node parameters ts on [0, 1] and values sample(ts * z), refined until
    consecutive values differ in phase by less than PHASE_CAP
    """
    z = complex(z)

    ts = np.linspace(0.0, 1.0, initial_steps + 1)
    values = np.asarray(sample(ts * z), dtype=complex)

    while True:
        if np.any(_vanished(values, floor)):
            index = int(np.flatnonzero(_vanished(values, floor))[0])
            raise vanish_exception(
                f"Continued function vanishes at {complex(ts[index] * z)} on the path to {z} (floor {floor})", z=z)

        bad = ~(np.abs(_phase_steps(values)) < PHASE_CAP)
        if not np.any(bad):
            return ts, values

        steps = len(ts) - 1 + int(np.count_nonzero(bad))
        if steps > max_steps:
            raise exception.BranchContinuationException(
                f"Phase refinement exceeded {max_steps} steps on the path to {z}", z=z)

        mids = 0.5 * (ts[:-1][bad] + ts[1:][bad])
        new_values = np.asarray(sample(mids * z), dtype=complex)

        ts = np.concatenate((ts, mids))
        values = np.concatenate((values, new_values))

        order = np.argsort(ts, kind="stable")
        ts = ts[order]
        values = values[order]

        logger.debug(f"Refined path to {z}: {len(ts) - 1} steps")

def radial_batch(sample, points, *, initial_steps=INITIAL_STEPS, floor=0.0):
    """
    Uniform paths for many endpoints in one pass. Returns the shared node parameters,
    the value matrix (one row per endpoint) and a mask of rows that need no refinement.
    """
    points = np.asarray(points, dtype=complex).ravel()

    ts = np.linspace(0.0, 1.0, initial_steps + 1)
    matrix = np.asarray(sample(points[:, None] * ts[None, :]), dtype=complex)

    ok = ~np.any(_vanished(matrix, floor), axis=1)
    ok &= np.all(np.abs(_phase_steps(matrix)) < PHASE_CAP, axis=1)

    return ts, matrix, ok

def continue_log(values, base):
    """
    Branch of log along each row of values, anchored at base for the first node
    """
    values = np.asarray(values, dtype=complex)

    increments = np.log(values[..., 1:] / values[..., :-1])
    start = np.zeros(values.shape[:-1] + (1,), dtype=complex)

    return base + np.concatenate((start, np.cumsum(increments, axis=-1)), axis=-1)

def continue_sqrt(values):
    """
    Branch of sqrt along each row of values, agreeing with the principal root at the first node
    """
    values = np.asarray(values, dtype=complex)
    roots = np.sqrt(values)

    flips = np.real(roots[..., 1:] * np.conj(roots[..., :-1])) < 0.0
    start = np.zeros(values.shape[:-1] + (1,), dtype=int)
    parity = np.concatenate((start, np.cumsum(flips, axis=-1) % 2), axis=-1)

    return np.where(parity == 1, -roots, roots)
