"""Synchronous DS-CDMA uplink model.

Spreading-code generation (Gold sets), signature shift matrices,
sum-of-sinusoids fading channels and composition of the received
chip-rate vector with an exact per-component truth breakdown.

Conventions used throughout:

* ``N`` chips per symbol, ``L_p`` channel taps, observation window
  ``M = N + L_p - 1`` chips.
* Signatures are real, unit norm, chips in ``{+1/sqrt(N), -1/sqrt(N)}``.
* Channel tap ``l`` is ``p_l * alpha_l[i]`` with ``alpha`` a unit-power
  complex fading process; path amplitudes are normalised so the average
  channel energy is one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Preferred pairs of primitive polynomials (exponent sets, constant term
# included) whose m-sequences combine into a three-valued Gold family.
PREFERRED_PAIRS = {
    5: ((5, 2, 0), (5, 4, 3, 2, 0)),
    6: ((6, 1, 0), (6, 5, 2, 1, 0)),
    7: ((7, 3, 0), (7, 3, 2, 1, 0)),
}

CLARKE_OSCILLATORS = 32


def msequence(poly_exps, degree: int) -> np.ndarray:
    """Maximal-length 0/1 sequence a[k] = XOR of a[k - (degree - t)] over
    the polynomial's lower exponents t, register seeded with all ones."""
    delays = [degree - t for t in poly_exps if t < degree]
    reg = [1] * degree
    out = np.empty(2**degree - 1, dtype=np.int8)
    for k in range(out.size):
        out[k] = reg[-1]
        nxt = 0
        for d in delays:
            nxt ^= reg[-d]
        reg.append(nxt)
        reg.pop(0)
    return out

def gold_sequences(degree: int) -> np.ndarray:
    """Full Gold family for the given register degree.

    Parameters
    ----------
    degree : int
        LFSR degree in {5, 6, 7}; sequence length is N = 2**degree - 1.

    Returns
    -------
    np.ndarray
        Array of shape (2**degree + 1, N). Rows are unit-norm signatures:
        the two base m-sequences followed by every chip-offset combination.
    """
    if degree not in PREFERRED_PAIRS:
        raise ConfigurationError(f"unsupported Gold degree {degree}; use one of {sorted(PREFERRED_PAIRS)}")
    p1, p2 = PREFERRED_PAIRS[degree]
    m1 = msequence(p1, degree)
    m2 = msequence(p2, degree)
    n = m1.size
    bits = [m1, m2] + [np.bitwise_xor(m1, np.roll(m2, -s)) for s in range(n)]
    chips = (1.0 - 2.0 * np.asarray(bits, dtype=np.float64)) / np.sqrt(n)
    return chips


def build_constraint_matrix(chips: np.ndarray, n_taps: int, symbol_shift: int = 0) -> np.ndarray:
    """Signature shift matrix mapping channel taps to window samples.

    Column ``j`` holds the signature delayed by ``j`` chips (zero padded);
    ``symbol_shift`` of -1/+1 produces the matrix for the previous/next
    symbol's chips falling inside the current M-chip window, used to build
    the intersymbol-interference terms.

    Entry (m, j) equals ``chips[m - j - symbol_shift*N]`` when that index
    is a valid chip position and zero otherwise.
    """
    if n_taps < 1:
        raise ValueError(f"n_taps must be >= 1, got {n_taps}")
    chips = np.asarray(chips, dtype=np.float64)
    n = chips.size
    m_rows = n + n_taps - 1
    out = np.zeros((m_rows, n_taps))
    rows = np.arange(m_rows)[:, None] - np.arange(n_taps)[None, :] - symbol_shift * n
    mask = (rows >= 0) & (rows < n)
    out[mask] = chips[rows[mask]]
    return out


def isi_span(n_taps: int, n_chips: int) -> int:
    """Number of symbols affected by a channel spanning ``n_taps`` chips:
    1 when there is no delay spread, 3 while the response fits within one
    symbol length, then 5, 7, ... per extra symbol length."""
    if n_taps < 1 or n_chips < 1:
        raise ValueError("n_taps and n_chips must be positive")
    if n_taps == 1:
        return 1
    return 2 * int(np.ceil(n_taps / n_chips)) + 1


@dataclass
class ChannelState:
    """Multipath FIR channel with per-path sum-of-sinusoids fading.

    ``taps`` is the length-``n_taps`` complex response; path ``l`` sits at
    chip offset ``offsets[l]`` with amplitude ``path_gains[l]``. The
    oscillator bank holds one row of phases/rates per path; ``doppler`` is
    the normalised Doppler rate f_d*T in cycles per symbol.
    """

    taps: np.ndarray
    path_gains: np.ndarray
    offsets: np.ndarray
    doppler: float
    phases: np.ndarray
    rates: np.ndarray

    def fading_gains(self) -> np.ndarray:
        """Current per-path complex gains (unit average power each)."""
        osc = np.exp(1j * self.phases)
        return osc.sum(axis=1) / np.sqrt(self.phases.shape[1])


def make_channel(rng: np.random.Generator, n_taps: int, doppler: float,
                 path_powers_db=(0.0, -3.0, -6.0), spacing_chips=(1, 2)) -> ChannelState:
    """Draw a multipath channel: path offsets start at chip 0 with
    spacings uniform over ``spacing_chips``, amplitudes from the relative
    power profile normalised to unit total average energy, and one Clarke
    oscillator bank (equally spaced arrival angles with a random rotation,
    i.i.d. phases) per path."""
    if doppler < 0:
        raise ValueError("doppler must be >= 0")
    n_paths = len(path_powers_db)
    gains = 10.0 ** (np.asarray(path_powers_db, dtype=np.float64) / 20.0)
    gains /= np.linalg.norm(gains)
    offsets = np.zeros(n_paths, dtype=np.int64)
    for l in range(1, n_paths):
        offsets[l] = offsets[l - 1] + rng.integers(spacing_chips[0], spacing_chips[1] + 1)
    if offsets[-1] >= n_taps:
        raise ValueError(f"path offsets {offsets} exceed the {n_taps}-tap window")
    n_osc = CLARKE_OSCILLATORS
    # arrival angles equally spaced over a half circle with a random
    # rotation per path: cos maps them injectively, so no two oscillators
    # share a Doppler rate and the phasor-sum power time-averages to one
    arrival = np.pi * (np.arange(n_osc) + rng.random((n_paths, 1))) / n_osc
    rates = 2.0 * np.pi * doppler * np.cos(arrival)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(n_paths, n_osc))
    state = ChannelState(
        taps=np.zeros(n_taps, dtype=np.complex128),
        path_gains=gains, offsets=offsets, doppler=doppler,
        phases=phases, rates=rates,
    )
    # normalise the realisation so the initial response has exactly unit
    # energy; the received per-symbol energy then equals A^2 and the
    # constraint value nu anchors a unit-modulus output
    init = gains * state.fading_gains()
    state.path_gains = gains / np.linalg.norm(init)
    state.taps[offsets] = state.path_gains * state.fading_gains()
    return state


def fading_step(state: ChannelState) -> ChannelState:
    """Advance the fading by one symbol interval and refresh ``taps``.
    With zero Doppler the taps are exactly constant."""
    if state.doppler > 0.0:
        state.phases += state.rates
        state.taps[state.offsets] = state.path_gains * state.fading_gains()
    return state


def jakes_autocorrelation(fd_t: float, lags: np.ndarray) -> np.ndarray:
    """Reference autocorrelation J0(2*pi*fd_t*lag) of the isotropic
    scattering model."""
    from scipy.special import j0

    return j0(2.0 * np.pi * fd_t * np.asarray(lags, dtype=np.float64))


@dataclass
class UserSlot:
    """One active uplink user: signature, amplitude, channel and the
    cached shift matrices for the current / previous / next symbol."""

    chips: np.ndarray
    amplitude: float
    channel: ChannelState
    active: bool = True
    mat_cur: np.ndarray = field(init=False)
    mat_prev: np.ndarray = field(init=False)
    mat_next: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.active and not self.amplitude > 0:
            raise ValueError("active user needs positive amplitude")
        n_taps = self.channel.taps.size
        self.mat_cur = build_constraint_matrix(self.chips, n_taps, 0)
        self.mat_prev = build_constraint_matrix(self.chips, n_taps, -1)
        self.mat_next = build_constraint_matrix(self.chips, n_taps, +1)

    def effective_signature(self) -> np.ndarray:
        """Signature convolved with the current channel, C_k h_k."""
        return self.mat_cur @ self.channel.taps


def qpsk_symbols(rng: np.random.Generator, n: int) -> np.ndarray:
    """i.i.d. unit-modulus QPSK draws (+-1 +-1j)/sqrt(2)."""
    re = rng.integers(0, 2, n) * 2 - 1
    im = rng.integers(0, 2, n) * 2 - 1
    return (re + 1j * im) / np.sqrt(2.0)


@dataclass
class ReceivedVector:
    """Observation window plus its exact construction breakdown. The
    desired part is the first user's current-symbol term; ``mai`` collects
    the other users' current-symbol terms and ``isi`` every user's
    neighbouring-symbol leakage."""

    samples: np.ndarray
    desired: np.ndarray
    mai: np.ndarray
    isi: np.ndarray
    noise: np.ndarray


def compose_received(users, b_prev, b_cur, b_next, noise_power: float,
                     rng: np.random.Generator) -> ReceivedVector:
    """Assemble one received vector r[i].

    Parameters
    ----------
    users : sequence of UserSlot
        User 0 is the desired user. Inactive slots contribute nothing.
    b_prev, b_cur, b_next : array_like
        Per-user symbols at i-1, i, i+1 (ISI span of 3; adjacent symbols
        only, valid while the delay spread stays below one symbol).
    noise_power : float
        Per-chip complex noise variance sigma^2, E[n n^H] = sigma^2 I.
    """
    if noise_power < 0:
        raise ValueError("noise_power must be >= 0")
    m_rows = users[0].mat_cur.shape[0]
    desired = np.zeros(m_rows, dtype=np.complex128)
    mai = np.zeros(m_rows, dtype=np.complex128)
    isi = np.zeros(m_rows, dtype=np.complex128)
    for k, u in enumerate(users):
        if not u.active:
            continue
        if u.mat_cur.shape[0] != m_rows:
            raise ValueError("users disagree on window size")
        h = u.channel.taps
        main = u.amplitude * b_cur[k] * (u.mat_cur @ h)
        if k == 0:
            desired += main
        else:
            mai += main
        isi += u.amplitude * (b_prev[k] * (u.mat_prev @ h) + b_next[k] * (u.mat_next @ h))
    if noise_power > 0.0:
        noise = np.sqrt(noise_power / 2.0) * (rng.standard_normal(m_rows) + 1j * rng.standard_normal(m_rows))
    else:
        noise = np.zeros(m_rows, dtype=np.complex128)
    samples = desired + mai + isi + noise
    return ReceivedVector(samples, desired, mai, isi, noise)


def noise_power_from_ebn0(ebn0_db: float, amplitude: float = 1.0) -> float:
    """Per-chip noise variance for a target Eb/N0.

    The desired user's average received symbol energy is amplitude^2
    (unit-norm signature, unit-energy channel, unit-modulus symbols);
    the quoted Eb/N0 is taken as the symbol-energy to per-chip noise
    power ratio, sigma^2 = A^2 / 10^(Eb/N0 / 10).
    """
    return amplitude**2 / 10.0 ** (ebn0_db / 10.0)
