"""Single-layer LSTM with a fully connected head, forward pass and BPTT in numpy.

Gate order in every 4H block is (input i, forget f, cell candidate g, output o).
Both bias vectors enter each step: z = W_ih x + b_ih + W_hh h + b_hh.
Every window starts from zero hidden and cell state.
"""

from dataclasses import dataclass, field

import numpy as np

from src.errors import NumericError, ShapeError
from src.stats.rng import RngStream

HIDDEN = 128
INPUTS = 1
OUTPUTS = 2
FORGET_BIAS = 1.0


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter set. flatten() order: W_ih, W_hh, b_ih, b_hh, W_fc, b_fc (row-major)."""

    w_ih: np.ndarray = field(repr=False)
    w_hh: np.ndarray = field(repr=False)
    b_ih: np.ndarray = field(repr=False)
    b_hh: np.ndarray = field(repr=False)
    w_fc: np.ndarray = field(repr=False)
    b_fc: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = self.w_hh.shape[1]
        i = self.w_ih.shape[1]
        o = self.w_fc.shape[0]
        expected = {
            "w_ih": (4 * h, i),
            "w_hh": (4 * h, h),
            "b_ih": (4 * h,),
            "b_hh": (4 * h,),
            "w_fc": (o, h),
            "b_fc": (o,),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ShapeError(f"{name} has shape {arr.shape}, expected {shape}")
            arr.setflags(write=False)

    @property
    def hidden(self) -> int:
        return self.w_hh.shape[1]

    @property
    def inputs(self) -> int:
        return self.w_ih.shape[1]

    @property
    def outputs(self) -> int:
        return self.w_fc.shape[0]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.hidden, self.inputs, self.outputs

    def flatten(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in (self.w_ih, self.w_hh, self.b_ih, self.b_hh, self.w_fc, self.b_fc)])

    @classmethod
    def unflatten(cls, vector, hidden: int, inputs: int = INPUTS, outputs: int = OUTPUTS) -> "ModelParams":
        v = np.asarray(vector, dtype=float)
        shapes = _shapes(hidden, inputs, outputs)
        total = sum(int(np.prod(s)) for s in shapes)
        if v.size != total:
            raise ShapeError(f"parameter vector has {v.size} entries, H={hidden} I={inputs} O={outputs} needs {total}")
        parts = []
        offset = 0
        for shape in shapes:
            size = int(np.prod(shape))
            parts.append(v[offset : offset + size].reshape(shape).copy())
            offset += size
        return cls(*parts)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.flatten())))


def _shapes(hidden: int, inputs: int, outputs: int) -> list[tuple[int, ...]]:
    return [
        (4 * hidden, inputs),
        (4 * hidden, hidden),
        (4 * hidden,),
        (4 * hidden,),
        (outputs, hidden),
        (outputs,),
    ]


def param_count(hidden: int, inputs: int = INPUTS, outputs: int = OUTPUTS) -> int:
    return sum(int(np.prod(s)) for s in _shapes(hidden, inputs, outputs))


def init_params(hidden: int, inputs: int, outputs: int, rng: RngStream) -> ModelParams:
    """Weights uniform in [-1/sqrt(H), 1/sqrt(H)]; forget slice of b_ih = 1, other biases 0."""
    if min(hidden, inputs, outputs) < 1:
        raise ShapeError(f"model dimensions must be >= 1, got H={hidden} I={inputs} O={outputs}")
    bound = 1.0 / np.sqrt(hidden)
    w_ih = rng.uniform(-bound, bound, (4 * hidden, inputs))
    w_hh = rng.uniform(-bound, bound, (4 * hidden, hidden))
    w_fc = rng.uniform(-bound, bound, (outputs, hidden))
    b_ih = np.zeros(4 * hidden)
    b_ih[hidden : 2 * hidden] = FORGET_BIAS
    return ModelParams(w_ih, w_hh, b_ih, np.zeros(4 * hidden), w_fc, np.zeros(outputs))


def _gate_affine(hdim: int) -> tuple[np.ndarray, np.ndarray]:
    """(scale, offset) so that tanh(z * scale) * scale + offset is sigmoid on i, f, o and tanh on g."""
    scale = np.full(4 * hdim, 0.5)
    scale[2 * hdim : 3 * hdim] = 1.0
    offset = np.full(4 * hdim, 0.5)
    offset[2 * hdim : 3 * hdim] = 0.0
    return scale, offset


@dataclass
class Tape:
    """
    Activations cached by forward() for backward(), time-major.
    hs and cs hold L + 1 states (index 0 is the zero initial state); acts holds
    the (i, f, g, o) activations per step side by side.
    """

    x: np.ndarray
    hs: np.ndarray
    cs: np.ndarray
    acts: np.ndarray
    tanh_cs: np.ndarray
    prediction: np.ndarray | None = None
    single: bool = False

    @property
    def gates(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
        return [tuple(np.split(a, 4, axis=1)) for a in self.acts]


def _as_batch(windows, inputs: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(windows, dtype=float)
    single = False
    if x.ndim == 1:
        x = x[None, :]
        single = True
    if x.ndim == 2:
        if inputs != 1:
            raise ShapeError(f"2-D windows imply 1 input feature, model has {inputs}")
        x = x[:, :, None]
    if x.ndim != 3 or x.shape[2] != inputs:
        raise ShapeError(f"windows must be (L,), (B, L) or (B, L, {inputs}); got {np.shape(windows)}")
    return x, single


def forward(params: ModelParams, windows) -> tuple[np.ndarray, Tape]:
    """
    Run the LSTM over each window and apply the head to the last hidden state.
    Accepts one window (L,) or a batch (B, L); the prediction has matching rank.
    """
    x, single = _as_batch(windows, params.inputs)
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite value in input window")
    batch, steps, _ = x.shape
    hdim = params.hidden
    scale, offset = _gate_affine(hdim)
    # input projections for every step at once, time-major
    xz = np.ascontiguousarray((x @ params.w_ih.T + (params.b_ih + params.b_hh)).transpose(1, 0, 2))
    w_hh_t = params.w_hh.T
    hs = np.zeros((steps + 1, batch, hdim))
    cs = np.zeros((steps + 1, batch, hdim))
    acts = np.empty((steps, batch, 4 * hdim))
    tanh_cs = np.empty((steps, batch, hdim))
    h = hs[0]
    c = cs[0]
    for t in range(steps):
        a = np.tanh((xz[t] + h @ w_hh_t) * scale) * scale + offset
        i = a[:, :hdim]
        f = a[:, hdim : 2 * hdim]
        g = a[:, 2 * hdim : 3 * hdim]
        o = a[:, 3 * hdim :]
        c = f * c + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        acts[t] = a
        cs[t + 1] = c
        tanh_cs[t] = tanh_c
        hs[t + 1] = h
    finite = np.isfinite(hs[1:]).all(axis=(1, 2)) & np.isfinite(cs[1:]).all(axis=(1, 2))
    if not finite.all():
        raise NumericError(f"non-finite LSTM state at step {int(np.argmin(finite))}")
    prediction = h @ params.w_fc.T + params.b_fc
    if not np.all(np.isfinite(prediction)):
        raise NumericError(f"non-finite prediction after step {steps - 1}")
    tape = Tape(x=x, hs=hs, cs=cs, acts=acts, tanh_cs=tanh_cs, prediction=prediction, single=single)
    return (prediction[0] if single else prediction), tape


def mse_loss(pred, target) -> float:
    p = np.asarray(pred, dtype=float)
    y = np.asarray(target, dtype=float)
    if p.shape != y.shape:
        raise ShapeError(f"prediction shape {p.shape} does not match target shape {y.shape}")
    return float(np.mean((p - y) ** 2))


def backward(params: ModelParams, tape: Tape, target) -> np.ndarray:
    """
    Exact gradient of mse_loss(prediction, target) w.r.t. every parameter, flattened
    in ModelParams order. For a batch the loss is the mean over all windows.
    """
    pred = tape.prediction
    y = np.asarray(target, dtype=float)
    if tape.single:
        y = y[None, :]
    if y.shape != pred.shape:
        raise ShapeError(f"target shape {y.shape} does not match prediction shape {pred.shape}")
    hdim = params.hidden
    steps = tape.acts.shape[0]
    dpred = 2.0 * (pred - y) / pred.size

    d_w_fc = dpred.T @ tape.hs[-1]
    d_b_fc = dpred.sum(axis=0)

    dh = dpred @ params.w_fc
    dc = np.zeros_like(dh)
    dzs = np.empty_like(tape.acts)
    for t in reversed(range(steps)):
        a = tape.acts[t]
        i = a[:, :hdim]
        f = a[:, hdim : 2 * hdim]
        g = a[:, 2 * hdim : 3 * hdim]
        o = a[:, 3 * hdim :]
        tanh_c = tape.tanh_cs[t]
        dc = dc + dh * o * (1.0 - tanh_c * tanh_c)
        dz = dzs[t]
        dz[:, :hdim] = dc * g * i * (1.0 - i)
        dz[:, hdim : 2 * hdim] = dc * tape.cs[t] * f * (1.0 - f)
        dz[:, 2 * hdim : 3 * hdim] = dc * i * (1.0 - g * g)
        dz[:, 3 * hdim :] = dh * tanh_c * o * (1.0 - o)
        dh = dz @ params.w_hh
        dc = dc * f
    # sum over (step, window) pairs in one contraction each
    d_w_ih = np.tensordot(dzs, tape.x.transpose(1, 0, 2), axes=([0, 1], [0, 1]))
    d_w_hh = np.tensordot(dzs, tape.hs[:-1], axes=([0, 1], [0, 1]))
    d_b = dzs.sum(axis=(0, 1))
    return np.concatenate([d_w_ih.ravel(), d_w_hh.ravel(), d_b, d_b, d_w_fc.ravel(), d_b_fc])


def predict(params: ModelParams, inputs: np.ndarray, batch_size: int = 1024) -> np.ndarray:
    """Predictions for every row of an N x L input matrix."""
    outs = [forward(params, inputs[k : k + batch_size])[0] for k in range(0, inputs.shape[0], batch_size)]
    return np.concatenate(outs) if outs else np.zeros((0, params.outputs))
