"""Small fully-connected Q-value approximator with manual backprop and SGD."""

import numpy as np


class Mlp:
    """ReLU hidden layers, linear output. Weights init U[-1/sqrt(fan_in), +1/sqrt(fan_in)]."""

    def __init__(self, layer_sizes, stream):
        self.layer_sizes = list(layer_sizes)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(stream.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(stream.uniform(-bound, bound, size=fan_out))
        self._vel_w = [np.zeros_like(w) for w in self.weights]
        self._vel_b = [np.zeros_like(b) for b in self.biases]

    def forward(self, x):
        """x: (batch, in) or (in,). Returns output of matching rank."""
        single = x.ndim == 1
        h = np.atleast_2d(x)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < len(self.weights) - 1:
                h = np.maximum(h, 0.0)
        return h[0] if single else h

    def forward_cached(self, x):
        acts = [np.atleast_2d(x)]
        h = acts[0]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < len(self.weights) - 1:
                h = np.maximum(h, 0.0)
            acts.append(h)
        return acts

    def gradients(self, x, grad_out):
        """Backprop d(loss)/d(params) given d(loss)/d(output)."""
        acts = self.forward_cached(x)
        grad_w = [None] * len(self.weights)
        grad_b = [None] * len(self.biases)
        delta = np.atleast_2d(grad_out)
        for i in reversed(range(len(self.weights))):
            grad_w[i] = acts[i].T @ delta
            grad_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0.0)
        return grad_w, grad_b

    def sgd_step(self, grad_w, grad_b, lr, momentum=0.9):
        for i in range(len(self.weights)):
            self._vel_w[i] = momentum * self._vel_w[i] - lr * grad_w[i]
            self._vel_b[i] = momentum * self._vel_b[i] - lr * grad_b[i]
            self.weights[i] += self._vel_w[i]
            self.biases[i] += self._vel_b[i]

    def get_params(self):
        return [w.copy() for w in self.weights], [b.copy() for b in self.biases]

    def set_params(self, weights, biases):
        self.weights = [w.copy() for w in weights]
        self.biases = [b.copy() for b in biases]

    def save(self, path):
        arrays = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
        np.savez(path, layer_sizes=np.array(self.layer_sizes), **arrays)

    @classmethod
    def load(cls, path):
        data = np.load(path)
        sizes = data["layer_sizes"].tolist()
        net = cls.__new__(cls)
        net.layer_sizes = sizes
        net.weights = [data[f"w{i}"] for i in range(len(sizes) - 1)]
        net.biases = [data[f"b{i}"] for i in range(len(sizes) - 1)]
        net._vel_w = [np.zeros_like(w) for w in net.weights]
        net._vel_b = [np.zeros_like(b) for b in net.biases]
        return net
