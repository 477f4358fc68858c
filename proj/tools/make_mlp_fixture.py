#!/usr/bin/env python3
"""Writes a small bicycle-approximating MLP in the engine's weights format,
plus reference forward passes for the C++ loader tests.

The hidden layer is random ReLU features; the output layer is a least-squares
fit of the normalized increment rate (x' - x) / dt. Deterministic for a seed.
"""
import argparse
import json
import math

import numpy as np

DT = 0.2
WHEELBASE = 4.0
STATE_LO = np.array([-10.0, -10.0, 0.0, -0.8])
STATE_HI = np.array([250.0, 10.0, 20.0, 0.8])
CONTROL_LO = np.array([-3.0, -0.5])
CONTROL_HI = np.array([3.0, 0.5])


def bicycle_step(x, u, dt=DT, wheelbase=WHEELBASE):
    px, py, v, psi = x.T
    a, delta = u.T
    return np.stack(
        [
            px + dt * v * np.cos(psi),
            py + dt * v * np.sin(psi),
            v + dt * a,
            psi + dt * v / wheelbase * np.tan(delta),
        ],
        axis=1,
    )


def sample(rng, n):
    x = rng.uniform(STATE_LO, STATE_HI, size=(n, 4))
    u = rng.uniform(CONTROL_LO, CONTROL_HI, size=(n, 2))
    return x, u


def forward(layers, z):
    h = z
    for i, (w, b) in enumerate(layers):
        h = h @ w.T + b
        if i + 1 < len(layers):
            h = np.maximum(h, 0.0)
    return h


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--weights", required=True)
    parser.add_argument("--vectors", required=True)
    parser.add_argument("--hidden", type=int, default=256)
    parser.add_argument("--samples", type=int, default=40000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    x, u = sample(rng, args.samples)
    inputs = np.hstack([x, u])
    rate = (bicycle_step(x, u) - x) / DT

    in_mean, in_std = inputs.mean(axis=0), np.maximum(inputs.std(axis=0), 1e-6)
    out_mean, out_std = rate.mean(axis=0), np.maximum(rate.std(axis=0), 1e-6)
    z = (inputs - in_mean) / in_std
    target = (rate - out_mean) / out_std

    w1 = rng.normal(0.0, 1.0, size=(args.hidden, 6))
    b1 = rng.uniform(-2.0, 2.0, size=args.hidden)
    h = np.maximum(z @ w1.T + b1, 0.0)
    design = np.hstack([h, np.ones((h.shape[0], 1))])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    w2 = coef[:-1].T
    b2 = coef[-1]
    layers = [(w1, b1), (w2, b2)]

    doc = {
        "state_dim": 4,
        "control_dim": 2,
        "dt": DT,
        "activation": "relu",
        "input_norm": {"mean": in_mean.tolist(), "std": in_std.tolist()},
        "output_norm": {"mean": out_mean.tolist(), "std": out_std.tolist()},
        "layers": [
            {"rows": w.shape[0], "cols": w.shape[1], "weights": w.ravel().tolist(), "bias": b.tolist()}
            for w, b in layers
        ],
    }
    with open(args.weights, "w") as f:
        json.dump(doc, f)  # json writes repr() floats, which round-trip

    # Shared vectors: normalized network inputs and raw network outputs.
    probe = rng.normal(0.0, 1.0, size=(100, 6))
    out = forward(layers, probe)
    with open(args.vectors, "w") as f:
        json.dump({"inputs": probe.tolist(), "outputs": out.tolist()}, f)

    xt, ut = sample(np.random.default_rng(args.seed + 1), 10000)
    zt = (np.hstack([xt, ut]) - in_mean) / in_std
    pred = xt + DT * (forward(layers, zt) * out_std + out_mean)
    truth = bicycle_step(xt, ut)
    inc = truth - xt
    nrmse = np.sqrt(((pred - truth) ** 2).mean(axis=0)) / inc.std(axis=0)
    print("normalized rmse per channel", nrmse, "overall", math.sqrt((nrmse ** 2).mean()))


if __name__ == "__main__":
    main()
