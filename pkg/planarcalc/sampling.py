"""
GUE moment sampler.

Draws independent n-tuples of N×N GUE matrices and averages the normalised
traces tr(A_{i₁}⋯A_{i_k})/N over the samples, returning a float64 moment
series. Runs are fully determined by the seed:

  * generator: numpy ``PCG64``;
  * streams: ``SeedSequence(seed).spawn(S)`` gives one sequence per sample,
    each of which spawns one child sequence per letter (matrix);
  * Gaussians: Marsaglia's polar method applied to ``Generator.random``
    uniforms, consumed in row-major order.

A GUE matrix is H = (A + A*) / (2√N) with A an array of independent complex
entries whose real and imaginary parts are standard normal, so off-diagonal
entries have complex variance 1/N and the real diagonal has variance 1/N.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import partial

import numpy as np

from planarcalc.exceptions import PreconditionError, ResourceLimitError
from planarcalc.parallel import ParallelRunner
from planarcalc.series import FLOAT64, Alphabet, Series, Word, make_series

logger = logging.getLogger(__name__)

MODELS = ("gue",)
MAX_DIMENSION = 1024
MAX_DEGREE = 8
MAX_SEED = 2**64


@dataclass(frozen=True)
class SampleSpec:
    """What to sample: ``samples`` draws of ``letters`` independent N×N matrices."""

    dimension: int
    samples: int
    letters: int = 1
    max_degree: int = 4
    model: str = "gue"

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise PreconditionError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.dimension < 2:
            raise PreconditionError(f"matrix dimension must be >= 2, got {self.dimension}")
        if self.samples < 1:
            raise PreconditionError(f"sample count must be >= 1, got {self.samples}")
        if self.letters < 1:
            raise PreconditionError(f"need at least one letter, got {self.letters}")
        if self.max_degree < 1:
            raise PreconditionError(f"max_degree must be >= 1, got {self.max_degree}")
        if self.dimension > MAX_DIMENSION:
            raise ResourceLimitError(f"dimension {self.dimension} exceeds {MAX_DIMENSION}")
        if self.max_degree > MAX_DEGREE:
            raise ResourceLimitError(f"max_degree {self.max_degree} exceeds {MAX_DEGREE}")


def polar_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` standard normal draws by the polar method."""
    chunks = []
    produced = 0
    while produced < count:
        pairs = max((count - produced + 1) // 2, 4)
        u = 2.0 * rng.random((pairs, 2)) - 1.0
        s = np.einsum("ij,ij->i", u, u)
        keep = (s > 0.0) & (s < 1.0)
        u, s = u[keep], s[keep]
        factor = np.sqrt(-2.0 * np.log(s) / s)
        chunk = (u * factor[:, None]).ravel()
        chunks.append(chunk)
        produced += chunk.size
    return np.concatenate(chunks)[:count]


def gue_matrix(rng: np.random.Generator, dimension: int) -> np.ndarray:
    normals = polar_normals(rng, 2 * dimension * dimension)
    a = normals[::2].reshape(dimension, dimension) + 1j * normals[1::2].reshape(
        dimension, dimension
    )
    return (a + a.conj().T) / (2.0 * np.sqrt(dimension))


def _sample_traces(spec: SampleSpec, stream: np.random.SeedSequence) -> dict[Word, float]:
    # One sample: normalised traces of every word, built from prefix products.
    matrices = [
        gue_matrix(np.random.Generator(np.random.PCG64(child)), spec.dimension)
        for child in stream.spawn(spec.letters)
    ]
    n = spec.dimension
    traces: dict[Word, float] = {}
    prefixes: dict[Word, np.ndarray] = {(): np.eye(n, dtype=np.complex128)}
    for degree in range(1, spec.max_degree + 1):
        grown: dict[Word, np.ndarray] = {}
        for word, prefix in prefixes.items():
            for i, matrix in enumerate(matrices, start=1):
                extended = word + (i,)
                traces[extended] = float(np.einsum("ij,ji->", prefix, matrix).real) / n
                if degree < spec.max_degree:
                    grown[extended] = prefix @ matrix
        prefixes = grown
    return traces


def sample_moments(spec: SampleSpec, seed: int, workers: int = 1) -> Series:
    """
    Averaged normalised trace moments of the GUE, as a float64 moment series.

    Samples may run on several workers; they are always summed in sample order
    so the result does not depend on ``workers``.
    """
    if not 0 <= seed < MAX_SEED:
        raise PreconditionError(f"seed must lie in [0, 2**64), got {seed}")
    streams = np.random.SeedSequence(seed).spawn(spec.samples)
    with ParallelRunner(workers) as runner:
        per_sample = runner.map(partial(_sample_traces, spec), streams)

    totals: dict[Word, float] = {}
    for traces in per_sample:
        for word, value in traces.items():
            totals[word] = totals.get(word, 0.0) + value
    entries = [((), 1.0)] + [(word, total / spec.samples) for word, total in totals.items()]
    logger.info(
        "sampled %d x %d GUE moments: N=%d, degree %d, seed %d",
        spec.samples,
        spec.letters,
        spec.dimension,
        spec.max_degree,
        seed,
    )
    return make_series(entries, Alphabet(spec.letters), spec.max_degree, scalar=FLOAT64)
