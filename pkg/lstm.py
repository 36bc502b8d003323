"""Single-layer LSTM with a dense head, trained by backpropagation through time.

Gate order inside every stacked weight block is input, forget, cell candidate,
output. The cell output passes through ReLU (not tanh) before the output gate;
all three gates keep the sigmoid.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from config import Config

PARAM_NAMES = ('input_weights', 'recurrent_weights', 'gate_biases', 'dense_weights', 'dense_bias')


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


@dataclass
class LstmNetwork:
    """
    Trainable weights of the recurrent layer and its dense head.

    Shapes (I = input size, H = hidden size, O = output size):
        input_weights: (I, 4H)
        recurrent_weights: (H, 4H)
        gate_biases: (4H,)
        dense_weights: (H, O)
        dense_bias: (O,)
    """
    input_weights: np.ndarray
    recurrent_weights: np.ndarray
    gate_biases: np.ndarray
    dense_weights: np.ndarray
    dense_bias: np.ndarray

    def __post_init__(self):
        self.validate()

    @property
    def hidden_size(self) -> int:
        return self.recurrent_weights.shape[0]

    @property
    def input_size(self) -> int:
        return self.input_weights.shape[0]

    @property
    def output_size(self) -> int:
        return self.dense_weights.shape[1]

    def validate(self):
        """Raise ValueError if the weight shapes disagree with each other."""
        h = self.recurrent_weights.shape[0]
        expected = {
            'input_weights': (self.input_weights.shape[0], 4 * h),
            'recurrent_weights': (h, 4 * h),
            'gate_biases': (4 * h,),
            'dense_weights': (h, self.dense_weights.shape[1] if self.dense_weights.ndim == 2 else -1),
            'dense_bias': (self.dense_weights.shape[1] if self.dense_weights.ndim == 2 else -1,),
        }
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise ValueError(f"{name} has shape {actual}, expected {shape}")

    def parameters(self) -> Dict[str, np.ndarray]:
        """Map of parameter name to array (live references, not copies)."""
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> 'LstmNetwork':
        return LstmNetwork(**{name: arr.copy() for name, arr in self.parameters().items()})

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(arr)) for arr in self.parameters().values())


def init_network(hidden_size: int, output_size: int, rng: np.random.Generator,
                 input_size: int = 1) -> LstmNetwork:
    """
    Initialize weights uniformly in [-k, k] with k = 1/sqrt(fan_in).

    The recurrent block sees the concatenated [input, hidden] vector, so its
    fan-in is input_size + hidden_size; the dense head's fan-in is hidden_size.

    Args:
        hidden_size: Number of LSTM units
        output_size: Number of dense outputs
        rng: Weight-initialization random stream
        input_size: Features per time step

    Returns:
        Freshly initialized network
    """
    if hidden_size < 1 or output_size < 1 or input_size < 1:
        raise ValueError("hidden_size, output_size and input_size must be >= 1")
    k_gate = 1.0 / np.sqrt(input_size + hidden_size)
    k_dense = 1.0 / np.sqrt(hidden_size)
    return LstmNetwork(
        input_weights=rng.uniform(-k_gate, k_gate, size=(input_size, 4 * hidden_size)),
        recurrent_weights=rng.uniform(-k_gate, k_gate, size=(hidden_size, 4 * hidden_size)),
        gate_biases=rng.uniform(-k_gate, k_gate, size=4 * hidden_size),
        dense_weights=rng.uniform(-k_dense, k_dense, size=(hidden_size, output_size)),
        dense_bias=rng.uniform(-k_dense, k_dense, size=output_size),
    )


def _as_sequence_batch(inputs: np.ndarray, input_size: int) -> np.ndarray:
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.ndim == 2:
        x = x[:, :, np.newaxis]
    if x.ndim != 3 or x.shape[2] != input_size:
        raise ValueError(f"expected inputs of shape (batch, steps, {input_size}), got {np.shape(inputs)}")
    return x


def forward(net: LstmNetwork, inputs: np.ndarray) -> Tuple[np.ndarray, dict]:
    """
    Run the recurrence over every time step and apply the dense head.

    Args:
        net: Network weights
        inputs: (steps,), (batch, steps) or (batch, steps, input_size)

    Returns:
        (outputs of shape (batch, output_size), cache for backward)
    """
    x = _as_sequence_batch(inputs, net.input_size)
    batch, steps, _ = x.shape
    H = net.hidden_size

    h = np.zeros((batch, H))
    c = np.zeros((batch, H))
    cache = {'x': x, 'h': [h], 'c': [c], 'i': [], 'f': [], 'g': [], 'o': [], 'a': []}

    for t in range(steps):
        z = x[:, t, :] @ net.input_weights + h @ net.recurrent_weights + net.gate_biases
        i = sigmoid(z[:, :H])
        f = sigmoid(z[:, H:2 * H])
        g = np.tanh(z[:, 2 * H:3 * H])
        o = sigmoid(z[:, 3 * H:])
        c = f * c + i * g
        a = relu(c)
        h = o * a
        for key, value in (('i', i), ('f', f), ('g', g), ('o', o), ('a', a), ('c', c), ('h', h)):
            cache[key].append(value)

    outputs = h @ net.dense_weights + net.dense_bias
    return outputs, cache


def backward(net: LstmNetwork, cache: dict, d_outputs: np.ndarray) -> Dict[str, np.ndarray]:
    """
    Backpropagate output gradients through the dense head and all time steps.

    Args:
        net: Network weights used in the forward pass
        cache: Cache returned by forward
        d_outputs: Gradient of the loss w.r.t. outputs, (batch, output_size)

    Returns:
        Gradients keyed like LstmNetwork.parameters()
    """
    x = cache['x']
    steps = x.shape[1]
    H = net.hidden_size

    h_last = cache['h'][-1]
    grads = {
        'dense_weights': h_last.T @ d_outputs,
        'dense_bias': d_outputs.sum(axis=0),
        'input_weights': np.zeros_like(net.input_weights),
        'recurrent_weights': np.zeros_like(net.recurrent_weights),
        'gate_biases': np.zeros_like(net.gate_biases),
    }

    dh = d_outputs @ net.dense_weights.T
    dc = np.zeros_like(dh)
    dz = np.empty((dh.shape[0], 4 * H))
    for t in reversed(range(steps)):
        i, f, g, o, a = (cache[k][t] for k in ('i', 'f', 'g', 'o', 'a'))
        c = cache['c'][t + 1]
        c_prev = cache['c'][t]
        h_prev = cache['h'][t]

        do = dh * a
        dc = dc + dh * o * (c > 0.0)
        dz[:, :H] = dc * g * i * (1.0 - i)
        dz[:, H:2 * H] = dc * c_prev * f * (1.0 - f)
        dz[:, 2 * H:3 * H] = dc * i * (1.0 - g * g)
        dz[:, 3 * H:] = do * o * (1.0 - o)

        grads['input_weights'] += x[:, t, :].T @ dz
        grads['recurrent_weights'] += h_prev.T @ dz
        grads['gate_biases'] += dz.sum(axis=0)

        dh = dz @ net.recurrent_weights.T
        dc = dc * f

    return grads


def mse_loss(predictions: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Mean squared error over every element and its gradient.

    Returns:
        (loss, d_loss/d_predictions)
    """
    diff = predictions - targets
    loss = float(np.mean(diff * diff))
    return loss, 2.0 * diff / diff.size


def loss_and_gradients(net: LstmNetwork, inputs: np.ndarray,
                       targets: np.ndarray) -> Tuple[float, Dict[str, np.ndarray]]:
    outputs, cache = forward(net, inputs)
    loss, d_outputs = mse_loss(outputs, np.atleast_2d(targets))
    return loss, backward(net, cache, d_outputs)


def clip_by_global_norm(grads: Dict[str, np.ndarray], max_norm: float) -> Tuple[Dict[str, np.ndarray], float]:
    """
    Rescale all gradients together when their joint L2 norm exceeds max_norm.

    Returns:
        (possibly rescaled gradients, norm before clipping)
    """
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        return {name: g * scale for name, g in grads.items()}, norm
    return grads, norm


class Adam:
    """Adam optimizer with bias-corrected first and second moments."""

    def __init__(self, net: LstmNetwork, learning_rate: float = None, beta1: float = None,
                 beta2: float = None, epsilon: float = None):
        """
        Initialize optimizer state for every parameter of net.

        Args:
            net: Network whose arrays are updated in place
            learning_rate: Step size (default Config.LEARNING_RATE)
            beta1: First-moment decay (default 0.9)
            beta2: Second-moment decay (default 0.999)
            epsilon: Denominator guard (default 1e-8)
        """
        self.net = net
        self.learning_rate = Config.LEARNING_RATE if learning_rate is None else learning_rate
        self.beta1 = Config.ADAM_BETA1 if beta1 is None else beta1
        self.beta2 = Config.ADAM_BETA2 if beta2 is None else beta2
        self.epsilon = Config.ADAM_EPSILON if epsilon is None else epsilon
        self.t = 0
        self.m = {name: np.zeros_like(arr) for name, arr in net.parameters().items()}
        self.v = {name: np.zeros_like(arr) for name, arr in net.parameters().items()}

    def step(self, grads: Dict[str, np.ndarray]):
        """Apply one update in place."""
        self.t += 1
        bias1 = 1.0 - self.beta1 ** self.t
        bias2 = 1.0 - self.beta2 ** self.t
        for name, param in self.net.parameters().items():
            g = grads[name]
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            m_hat = self.m[name] / bias1
            v_hat = self.v[name] / bias2
            param -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)
