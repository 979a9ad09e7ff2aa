"""Fourier-side building blocks for 2*pi-periodic delay problems.

Conventions used throughout the package:

* functions are 2*pi-periodic and sampled at the uniform nodes t_j = 2*pi*j/N;
* the k-th Fourier coefficient of f is fhat(k) = (1/2pi) int_0^{2pi} e^{-ikt} f(t) dt;
* the history segment of u at time t is u_t(theta) = u(t + theta), theta in [-r, 0];
* applying a delay functional to the pure mode e^{ikt} v multiplies v by a fixed
  matrix, the mode symbol of the functional.  Mode symbols are what the solver
  and the diagnostics consume.

Everything here is a pure function of immutable inputs; evaluations for
different modes are independent and may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import AliasingError, DimensionError, InvalidKernelError

TWO_PI = 2.0 * np.pi

# Gauss-Legendre rule used per quadrature panel.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def mode_range(bandwidth: int) -> np.ndarray:
    """Integer modes -K..K for a given bandwidth K."""
    return np.arange(-bandwidth, bandwidth + 1)


def _unit_phase(x):
    """e^{-2*pi*i*x} with the whole turns removed before evaluation.

    Reducing x mod 1 first keeps lags that are exact binary fractions of the
    period (pi, 2*pi, ...) on the unit circle exactly, so period-multiple lags
    produce mode-independent symbols with no k*eps phase drift.
    """
    return np.exp(-2j * np.pi * np.mod(x, 1.0))


def _as_state_matrix(value, dim: int, what: str) -> np.ndarray:
    mat = np.asarray(value)
    if mat.ndim == 0:
        mat = mat.reshape(1, 1)
    if mat.shape != (dim, dim):
        raise DimensionError(f"{what}: expected a {dim}x{dim} matrix, got {mat.shape}")
    return mat


class DistributedDelay:
    """Distributed part  int_{-span}^0 K(theta) u(t + theta) dtheta  of a functional.

    Parameters
    ----------
    kernel : callable or ndarray
        Either a function of theta returning an (n, n) matrix (a vectorized
        callable may accept an array of shape (q,) and return (q, n, n)), or
        an array of kernel samples of shape (m, n, n) taken on the uniform
        grid from -span to 0 (m >= 4; interpolated with a cubic spline).
    span : float
        Positive length of the memory window.
    resolution : int
        Base quadrature panels per 2*pi of span.  The actual panel count also
        grows with the mode index so that oscillatory weights stay resolved.
    """

    def __init__(self, kernel, span: float, resolution: int = 64):
        if not span > 0.0:
            raise ValueError(f"distributed span must be positive, got {span}")
        if resolution < 1:
            raise ValueError("quadrature resolution must be a positive integer")
        self.span = float(span)
        self.resolution = int(resolution)
        self._spline = None
        self._callable = None
        self._vectorized = False
        if callable(kernel):
            self._callable = kernel
            self._probe_callable()
        else:
            samples = np.asarray(kernel)
            if samples.ndim == 1:
                samples = samples.reshape(-1, 1, 1)
            if samples.ndim != 3 or samples.shape[1] != samples.shape[2]:
                raise DimensionError(
                    "kernel samples must have shape (m, n, n), got "
                    f"{samples.shape}"
                )
            if samples.shape[0] < 4:
                raise ValueError("need at least 4 kernel samples for interpolation")
            from scipy.interpolate import CubicSpline

            grid = np.linspace(-self.span, 0.0, samples.shape[0])
            self._samples = samples
            self._spline = CubicSpline(grid, samples, axis=0)
            self.dim = samples.shape[1]
            self.is_real = bool(np.isrealobj(samples) or np.allclose(samples.imag, 0.0))
        self.kernel = kernel

    def _probe_callable(self):
        probe = np.array([-self.span / 2.0, -self.span / 4.0])
        try:
            out = np.asarray(self._callable(probe))
        except Exception:
            out = None
        if out is not None and out.ndim == 3 and out.shape[0] == 2:
            self._vectorized = True
            self.dim = out.shape[1]
            sample = out
        else:
            single = np.asarray(self._callable(float(probe[0])))
            if single.ndim == 0:
                single = single.reshape(1, 1)
            if single.ndim != 2 or single.shape[0] != single.shape[1]:
                raise DimensionError(
                    "distributed kernel must return an (n, n) matrix, got "
                    f"shape {single.shape}"
                )
            self.dim = single.shape[0]
            sample = single[None]
        self.is_real = bool(np.allclose(np.imag(sample), 0.0))

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        """Kernel values at the points theta, as an array of shape (q, n, n)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if self._spline is not None:
            return self._spline(theta)
        if self._vectorized:
            return np.asarray(self._callable(theta))
        rows = [np.asarray(self._callable(float(t))).reshape(self.dim, self.dim)
                for t in theta]
        return np.stack(rows, axis=0)

    def scaled(self, factor: complex) -> "DistributedDelay":
        if self._spline is not None:
            return DistributedDelay(factor * self._samples, self.span, self.resolution)
        base = self._callable
        return DistributedDelay(
            lambda theta, _f=base, _a=factor: _a * np.asarray(_f(theta)),
            self.span,
            self.resolution,
        )


def _distributed_symbol(dist: DistributedDelay, k: int) -> np.ndarray:
    """Composite Gauss-Legendre evaluation of  int_{-span}^0 K(theta) e^{ik theta} dtheta.

    Panels: at least ``resolution`` per 2*pi of span, and at least |k|*span/pi
    so the oscillation never exceeds ~pi radians per panel.
    """
    span = dist.span
    panels = max(
        int(np.ceil(dist.resolution * span / TWO_PI)),
        int(np.ceil(abs(k) * span / np.pi)),
        1,
    )
    edges = np.linspace(-span, 0.0, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    theta = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    values = dist.evaluate(theta)
    phases = np.exp(1j * k * theta)
    return np.einsum("q,q,qij->ij", weights, phases, values)


@dataclass
class DelayFunctional:
    """Bounded delay functional: discrete-lag atoms plus a distributed kernel.

    Applying the functional to a history segment gives

        L(u_t) = sum_j  B_j u(t - r_j)  +  int_{-span}^0 K(theta) u(t + theta) dtheta

    with every lag r_j in [0, horizon] and horizon a positive multiple of 2*pi.

    ``atoms`` is a sequence of (coefficient matrix, lag) pairs.  Scalar
    coefficients are accepted when dim == 1.
    """

    dim: int
    atoms: Sequence = field(default_factory=list)
    distributed: Optional[DistributedDelay] = None
    horizon: Optional[float] = None

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("state dimension must be >= 1")
        normalized = []
        for i, (coef, lag) in enumerate(self.atoms):
            mat = _as_state_matrix(coef, self.dim, f"atom {i} coefficient")
            lag = float(lag)
            if lag < 0.0:
                raise ValueError(f"atom {i}: lag must be nonnegative, got {lag}")
            normalized.append((mat, lag))
        self.atoms = normalized
        if self.distributed is not None and self.distributed.dim != self.dim:
            raise DimensionError(
                f"distributed kernel dimension {self.distributed.dim} != {self.dim}"
            )
        reach = max(
            [lag for _, lag in self.atoms]
            + ([self.distributed.span] if self.distributed is not None else [])
            + [0.0]
        )
        if self.horizon is None:
            periods = max(1, int(np.ceil(reach / TWO_PI - 1e-12)))
            self.horizon = TWO_PI * periods
        else:
            self.horizon = float(self.horizon)
            periods = self.horizon / TWO_PI
            if self.horizon <= 0.0 or abs(periods - round(periods)) > 1e-9:
                raise ValueError(
                    f"horizon must be a positive multiple of 2*pi, got {self.horizon}"
                )
            if reach > self.horizon + 1e-9:
                raise ValueError(
                    f"lags/span reach {reach} beyond the horizon {self.horizon}"
                )

    @classmethod
    def empty(cls, dim: int) -> "DelayFunctional":
        return cls(dim=dim)

    @property
    def is_empty(self) -> bool:
        return not self.atoms and self.distributed is None

    @property
    def is_real(self) -> bool:
        atoms_real = all(np.allclose(np.imag(c), 0.0) for c, _ in self.atoms)
        dist_real = self.distributed is None or self.distributed.is_real
        return atoms_real and dist_real

    def symbol(self, k: int) -> np.ndarray:
        """Mode symbol: the matrix by which the functional acts on e^{ikt} v."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for coef, lag in self.atoms:
            out += coef * _unit_phase(k * (lag / TWO_PI))
        if self.distributed is not None:
            out += _distributed_symbol(self.distributed, int(k))
        return out

    def symbol_window(self, ks: np.ndarray) -> np.ndarray:
        """Symbols for all modes in ``ks`` at once, shape (len(ks), n, n)."""
        ks = np.asarray(ks)
        out = np.zeros((len(ks), self.dim, self.dim), dtype=complex)
        for coef, lag in self.atoms:
            phases = _unit_phase(ks * (lag / TWO_PI))
            out += phases[:, None, None] * coef[None, :, :]
        if self.distributed is not None:
            for i, k in enumerate(ks):
                out[i] += _distributed_symbol(self.distributed, int(k))
        return out

    def __add__(self, other: "DelayFunctional") -> "DelayFunctional":
        if not isinstance(other, DelayFunctional):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionError("cannot add functionals of different dimension")
        if self.distributed is not None and other.distributed is not None:
            raise ValueError("combine distributed kernels before adding functionals")
        return DelayFunctional(
            dim=self.dim,
            atoms=list(self.atoms) + list(other.atoms),
            distributed=self.distributed or other.distributed,
            horizon=max(self.horizon, other.horizon),
        )

    def __rmul__(self, factor) -> "DelayFunctional":
        dist = None
        if self.distributed is not None:
            dist = self.distributed.scaled(factor)
        return DelayFunctional(
            dim=self.dim,
            atoms=[(factor * c, lag) for c, lag in self.atoms],
            distributed=dist,
            horizon=self.horizon,
        )


def delay_symbol(functional: DelayFunctional, k: int) -> np.ndarray:
    """Mode-k symbol of a delay functional.

    For u(t) = e^{ikt} v the history segment is u_t(theta) = e^{ikt} e^{ik theta} v,
    so the functional acts on the coefficient v through the matrix

        sum_j B_j e^{-ik r_j}  +  int_{-span}^0 K(theta) e^{ik theta} dtheta.

    Conjugate symmetry symbol(-k) = conj(symbol(k)) holds for real data.
    """
    return functional.symbol(k)


@dataclass
class KernelSpec:
    """Memory kernel  a(t) = sum c * t^m * e^{-alpha t}  on t >= 0.

    Each term is a (c, m, alpha) triple with complex weight c, integer power
    m >= 0 and decay rate alpha > 0, which keeps a integrable on [0, inf).
    The transform  atilde(lam) = int_0^inf e^{-lam t} a(t) dt  and the L1 norm
    are available in closed form.
    """

    terms: Sequence = field(default_factory=list)

    def __post_init__(self):
        normalized = []
        for i, (c, m, alpha) in enumerate(self.terms):
            if float(m) != int(m) or int(m) < 0:
                raise InvalidKernelError(f"term {i}: power m must be an integer >= 0")
            alpha = float(alpha)
            if not alpha > 0.0:
                raise InvalidKernelError(
                    f"term {i}: decay rate alpha must be positive, got {alpha}"
                )
            normalized.append((complex(c), int(m), alpha))
        self.terms = normalized

    @classmethod
    def empty(cls) -> "KernelSpec":
        return cls(terms=[])

    @classmethod
    def exponential(cls, weight=1.0, rate=1.0) -> "KernelSpec":
        return cls(terms=[(weight, 0, rate)])

    @property
    def is_empty(self) -> bool:
        return not self.terms

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0.0 for c, _, _ in self.terms)

    def laplace(self, lam):
        """Transform value(s) at lam; accepts scalars or arrays."""
        lam = np.asarray(lam, dtype=complex)
        out = np.zeros_like(lam)
        for c, m, alpha in self.terms:
            out = out + c * math.factorial(m) / (alpha + lam) ** (m + 1)
        return out if out.ndim else complex(out)

    def l1_norm(self) -> float:
        return float(
            sum(abs(c) * math.factorial(m) / alpha ** (m + 1) for c, m, alpha in self.terms)
        )

    def eval(self, t):
        """Kernel values a(t); accepts scalars or arrays, t >= 0."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for c, m, alpha in self.terms:
            out = out + c * t**m * np.exp(-alpha * t)
        if self.is_real:
            out = out.real
        return out if out.ndim else out[()]

    def derivative(self) -> "KernelSpec":
        """Formal derivative; stays inside the c*t^m*e^{-alpha t} family."""
        terms = []
        for c, m, alpha in self.terms:
            terms.append((-alpha * c, m, alpha))
            if m >= 1:
                terms.append((c * m, m - 1, alpha))
        return KernelSpec(terms=terms)

    def value_at_zero(self) -> complex:
        return complex(sum(c for c, m, _ in self.terms if m == 0))

    def derivative_at_zero(self, order: int) -> complex:
        kernel = self
        for _ in range(order):
            kernel = kernel.derivative()
        return kernel.value_at_zero()


def laplace_symbol(kernel: KernelSpec, k: int):
    """Transform of the kernel at i*k, evaluated in closed form.

    Satisfies |value| <= l1_norm() and conjugate symmetry for real kernels.
    Accepts an integer k or an array of modes.
    """
    ks = np.asarray(k)
    return kernel.laplace(1j * ks)


def laplace_symbol_quadrature(kernel: KernelSpec, k: int, tol: float = 1e-12) -> complex:
    """Numeric-quadrature route to the kernel transform at i*k.

    Truncates the half-line where the remaining L1 mass drops below ``tol``
    relative to the full L1 norm, then integrates adaptively.  Slower than the
    closed form; kept as an independent cross-check and for sampled kernels.
    """
    if kernel.is_empty:
        return 0.0 + 0.0j
    from scipy.integrate import quad
    from scipy.special import gammaincc

    l1 = kernel.l1_norm()
    horizon = 10.0
    while horizon < 1e7:
        tail = sum(
            abs(c) * math.factorial(m) / alpha ** (m + 1) * gammaincc(m + 1, alpha * horizon)
            for c, m, alpha in kernel.terms
        )
        if tail < tol * max(l1, 1.0):
            break
        horizon *= 2.0
    re = quad(lambda t: (kernel.eval(t) * np.exp(-1j * k * t)).real, 0.0, horizon,
              limit=800, epsabs=1e-13, epsrel=1e-13)[0]
    im = quad(lambda t: (kernel.eval(t) * np.exp(-1j * k * t)).imag, 0.0, horizon,
              limit=800, epsabs=1e-13, epsrel=1e-13)[0]
    return complex(re, im)


def analyze(samples, bandwidth: Optional[int] = None) -> np.ndarray:
    """Fourier coefficients of uniform grid samples.

    Parameters
    ----------
    samples : ndarray (N,) or (N, n) or PeriodicGridFunction
    bandwidth : int, optional
        Largest retained |k|; defaults to (N-1)//2.

    Returns
    -------
    ndarray of shape (2K+1, n); row i holds the coefficient of mode i - K.

    Exact to round-off for trigonometric polynomials of degree <= K when
    N >= 2K+1; raises AliasingError otherwise.
    """
    if isinstance(samples, PeriodicGridFunction):
        samples = samples.samples
    samples = np.asarray(samples)
    if samples.ndim == 1:
        samples = samples[:, None]
    n_samples = samples.shape[0]
    if bandwidth is None:
        bandwidth = (n_samples - 1) // 2
    if n_samples < 2 * bandwidth + 1:
        raise AliasingError(
            f"need N >= 2K+1 samples for bandwidth K={bandwidth}, got N={n_samples}"
        )
    spectrum = np.fft.fft(samples, axis=0) / n_samples
    ks = mode_range(bandwidth)
    return spectrum[np.mod(ks, n_samples)]


def synthesize(coefficients, n_samples: int) -> "PeriodicGridFunction":
    """Grid function with the given coefficients, sampled at N uniform nodes."""
    return PeriodicGridFunction.from_coefficients(coefficients, n_samples)


class PeriodicGridFunction:
    """A 2*pi-periodic vector-valued function held two ways at once:

    uniform samples at t_j = 2*pi*j/N and Fourier coefficients on |k| <= K.
    The pair is kept consistent (N >= 2K+1, so analysis/synthesis round-trips
    on the stored band).
    """

    def __init__(self, samples: np.ndarray, coefficients: np.ndarray):
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim == 1:
            samples = samples[:, None]
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        if coefficients.shape[0] % 2 == 0:
            raise ValueError("coefficient array must cover modes -K..K (odd length)")
        if coefficients.shape[1] != samples.shape[1]:
            raise DimensionError("samples and coefficients disagree on dimension")
        bandwidth = (coefficients.shape[0] - 1) // 2
        if samples.shape[0] < 2 * bandwidth + 1:
            raise AliasingError(
                f"N={samples.shape[0]} too small for bandwidth K={bandwidth}"
            )
        self.samples = samples
        self.coefficients = coefficients
        self.bandwidth = bandwidth

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_samples(cls, samples, bandwidth: Optional[int] = None) -> "PeriodicGridFunction":
        coeffs = analyze(samples, bandwidth)
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim == 1:
            samples = samples[:, None]
        return cls(samples, coeffs)

    @classmethod
    def from_coefficients(cls, coefficients, n_samples: int) -> "PeriodicGridFunction":
        if isinstance(coefficients, dict):
            if coefficients:
                bandwidth = max(abs(int(k)) for k in coefficients)
                first = np.atleast_1d(np.asarray(next(iter(coefficients.values()))))
                dim = first.shape[0]
            else:
                bandwidth, dim = 0, 1
            arr = np.zeros((2 * bandwidth + 1, dim), dtype=complex)
            for k, vec in coefficients.items():
                arr[int(k) + bandwidth] = np.atleast_1d(np.asarray(vec))
            coefficients = arr
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        bandwidth = (coefficients.shape[0] - 1) // 2
        if n_samples < 2 * bandwidth + 1:
            raise AliasingError(
                f"N={n_samples} too small for bandwidth K={bandwidth}"
            )
        spectrum = np.zeros((n_samples, coefficients.shape[1]), dtype=complex)
        ks = mode_range(bandwidth)
        spectrum[np.mod(ks, n_samples)] = coefficients
        samples = np.fft.ifft(spectrum * n_samples, axis=0)
        return cls(samples, coefficients)

    @classmethod
    def from_harmonics(cls, cos=(), sin=(), const=0.0, dim: Optional[int] = None,
                       n_samples: Optional[int] = None) -> "PeriodicGridFunction":
        """Trigonometric polynomial  const + sum_m cos_m cos(mt) + sin_m sin(mt).

        Harmonic entries may be scalars (dim 1) or length-n vectors.  The
        Fourier coefficients are assembled exactly: fhat(+-m) = (c_m -+ i s_m)/2.
        """
        cos = [np.atleast_1d(np.asarray(c, dtype=complex)) for c in cos]
        sin = [np.atleast_1d(np.asarray(s, dtype=complex)) for s in sin]
        const = np.atleast_1d(np.asarray(const, dtype=complex))
        if dim is None:
            dim = max([v.shape[0] for v in cos + sin + [const]] or [1])
        bandwidth = max(len(cos), len(sin))

        def _vec(v):
            if v.shape[0] == dim:
                return v
            if v.shape[0] == 1:
                return np.full(dim, v[0])
            raise DimensionError(f"harmonic entry of length {v.shape[0]}, expected {dim}")

        coeffs = np.zeros((2 * bandwidth + 1, dim), dtype=complex)
        coeffs[bandwidth] = _vec(const)
        for m in range(1, bandwidth + 1):
            c = _vec(cos[m - 1]) if m <= len(cos) else np.zeros(dim)
            s = _vec(sin[m - 1]) if m <= len(sin) else np.zeros(dim)
            coeffs[bandwidth + m] = (c - 1j * s) / 2.0
            coeffs[bandwidth - m] = (c + 1j * s) / 2.0
        if n_samples is None:
            n_samples = max(4 * bandwidth, 2 * bandwidth + 1, 16)
        return cls.from_coefficients(coeffs, n_samples)

    @classmethod
    def zero(cls, dim: int = 1, n_samples: int = 16) -> "PeriodicGridFunction":
        return cls.from_coefficients(np.zeros((1, dim)), n_samples)

    # -- accessors ---------------------------------------------------------

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_samples) / self.n_samples

    def coefficient(self, k: int) -> np.ndarray:
        if abs(k) > self.bandwidth:
            return np.zeros(self.dim, dtype=complex)
        return self.coefficients[k + self.bandwidth]

    def coefficients_map(self) -> dict:
        return {int(k): self.coefficients[k + self.bandwidth]
                for k in mode_range(self.bandwidth)}

    @property
    def is_real(self) -> bool:
        scale = max(np.max(np.abs(self.samples)), 1.0)
        return bool(np.max(np.abs(self.samples.imag)) <= 1e-13 * scale)

    # -- operations --------------------------------------------------------

    def resample(self, n_samples: int) -> "PeriodicGridFunction":
        return PeriodicGridFunction.from_coefficients(self.coefficients, n_samples)

    def derivative(self) -> "PeriodicGridFunction":
        ks = mode_range(self.bandwidth)
        return PeriodicGridFunction.from_coefficients(
            (1j * ks)[:, None] * self.coefficients, self.n_samples
        )

    def max_norm(self) -> float:
        if self.samples.size == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.samples, axis=1)))

    def lp_norm(self, p: float, refine: int = 1) -> float:
        """Grid trapezoid value of (int_0^{2pi} |f(t)|^p dt)^{1/p}.

        Exact for band-limited data when p == 2; pass refine > 1 to tighten
        the quadrature for other p.
        """
        if p < 1:
            raise ValueError("p must be >= 1")
        grid = self if refine <= 1 else self.resample(refine * self.n_samples)
        pointwise = np.linalg.norm(grid.samples, axis=1)
        dt = TWO_PI / grid.n_samples
        return float((dt * np.sum(pointwise**p)) ** (1.0 / p))

    def band_energy_split(self, bandwidth: int):
        """(energy inside |k| <= bandwidth, energy beyond), in l2 of coefficients."""
        ks = mode_range(self.bandwidth)
        energy = np.sum(np.abs(self.coefficients) ** 2, axis=1)
        inside = float(np.sum(energy[np.abs(ks) <= bandwidth]))
        outside = float(np.sum(energy[np.abs(ks) > bandwidth]))
        return inside, outside

    def _binary(self, other, sign) -> "PeriodicGridFunction":
        if not isinstance(other, PeriodicGridFunction):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionError("dimension mismatch")
        bandwidth = max(self.bandwidth, other.bandwidth)
        n_samples = max(self.n_samples, other.n_samples)
        coeffs = np.zeros((2 * bandwidth + 1, self.dim), dtype=complex)
        coeffs[bandwidth - self.bandwidth: bandwidth + self.bandwidth + 1] = self.coefficients
        other_block = other.coefficients if sign > 0 else -other.coefficients
        coeffs[bandwidth - other.bandwidth: bandwidth + other.bandwidth + 1] += other_block
        return PeriodicGridFunction.from_coefficients(coeffs, n_samples)

    def __add__(self, other):
        return self._binary(other, +1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __mul__(self, factor):
        return PeriodicGridFunction(factor * self.samples, factor * self.coefficients)

    __rmul__ = __mul__


@dataclass
class ProblemSpec:
    """The data of one periodic problem on the circle:

        d/dt [x(t) - L(x_t)] = A [x(t) - L(x_t)] + G(x_t)
                               + int_{-inf}^t a(t-s) x(s) ds + f(t)

    with state matrix A, neutral delay functional L (differentiated part),
    reaction delay functional G, memory kernel a and 2*pi-periodic forcing f.
    ``truncation`` is the solver bandwidth K; ``grid`` the sample count N
    (defaults to 4K, which keeps products with delay terms alias-safe).
    """

    state_matrix: np.ndarray
    neutral_delay: Optional[DelayFunctional] = None
    reaction_delay: Optional[DelayFunctional] = None
    kernel: Optional[KernelSpec] = None
    forcing: Optional[PeriodicGridFunction] = None
    truncation: int = 64
    grid: Optional[int] = None

    def __post_init__(self):
        mat = np.asarray(self.state_matrix)
        if mat.ndim == 0:
            mat = mat.reshape(1, 1)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"state matrix must be square, got shape {mat.shape}")
        self.state_matrix = mat
        n = mat.shape[0]
        if self.neutral_delay is None:
            self.neutral_delay = DelayFunctional.empty(n)
        if self.reaction_delay is None:
            self.reaction_delay = DelayFunctional.empty(n)
        if self.kernel is None:
            self.kernel = KernelSpec.empty()
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")
        if self.grid is None:
            self.grid = 4 * self.truncation
        if self.grid < 2 * self.truncation + 1:
            raise AliasingError(
                f"grid N={self.grid} must satisfy N >= 2K+1 for K={self.truncation}"
            )
        if self.forcing is None:
            self.forcing = PeriodicGridFunction.zero(n, n_samples=max(16, self.grid))
        for name, obj in (("neutral delay", self.neutral_delay),
                          ("reaction delay", self.reaction_delay)):
            if obj.dim != n:
                raise DimensionError(f"{name} dimension {obj.dim} != state dimension {n}")
        if self.forcing.dim != n:
            raise DimensionError(
                f"forcing dimension {self.forcing.dim} != state dimension {n}"
            )

    @property
    def dim(self) -> int:
        return self.state_matrix.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(
            np.allclose(np.imag(self.state_matrix), 0.0)
            and self.neutral_delay.is_real
            and self.reaction_delay.is_real
            and self.kernel.is_real
            and self.forcing.is_real
        )


class ScaledDifferences(NamedTuple):
    """k-scaled forward differences of the mode-symbol sequences.

    kernel        : k * (atilde(i(k+1)) - atilde(ik))          (complex scalar)
    neutral       : k * (L_{k+1} - L_k)                        (n x n)
    reaction      : k * (G_{k+1} - G_k)                        (n x n)
    neutral_state : k * A (L_{k+1} - L_k)                      (n x n)
    """

    kernel: complex
    neutral: np.ndarray
    reaction: np.ndarray
    neutral_state: np.ndarray


def difference_sequences(spec: ProblemSpec, k: int) -> ScaledDifferences:
    """Exact finite differences of the symbol sequences at k, scaled by k."""
    lk = spec.neutral_delay.symbol(k)
    lk1 = spec.neutral_delay.symbol(k + 1)
    gk = spec.reaction_delay.symbol(k)
    gk1 = spec.reaction_delay.symbol(k + 1)
    ak = laplace_symbol(spec.kernel, k)
    ak1 = laplace_symbol(spec.kernel, k + 1)
    neutral = k * (lk1 - lk)
    return ScaledDifferences(
        kernel=k * (ak1 - ak),
        neutral=neutral,
        reaction=k * (gk1 - gk),
        neutral_state=spec.state_matrix @ neutral,
    )
