"""Writes tests/data/echo_transcript.jsonl: request/response frames for the echo fixture.

Lines starting with "> " are client frames, "< " the expected server frame.
Frames are compact JSON with sorted keys; tensors are base64 of little-endian
float32. Built with numpy + json only.
"""
import base64
import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parents[1] / "data" / "echo_transcript.jsonl"


def tensor(values, shape):
    arr = np.asarray(values, dtype="<f4").reshape(shape)
    return {"shape": list(shape), "data": base64.b64encode(arr.tobytes()).decode()}


def frame(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def request(id_, op, timestep=0, prompt="", ref_weight=0.0, guidance=0.0, t=None, ref=None):
    obj = {"id": id_, "op": op, "timestep": timestep, "prompt": prompt, "ref_weight": ref_weight, "guidance": guidance}
    if t is not None:
        obj["tensor"] = t
    if ref is not None:
        obj["ref"] = ref
    return obj


def main():
    exchanges = []

    info = {
        "protocol": 1,
        "latent": [4, 64, 64],
        "scale": 8,
        "schedule": {"train_steps": 1000, "beta_start": 0.00085, "beta_end": 0.012},
        "concurrency_safe": False,
    }
    exchanges.append((request(1, "info"), {"id": 1, "info": info}))

    z = tensor(np.linspace(-1.5, 1.5, 16), (4, 2, 2))
    exchanges.append((request(2, "predict_noise", 981, "a photo of a cat", 0.0, 7.5, z), {"id": 2, "tensor": z}))

    z2 = tensor([0.25, -0.5, 1e3, -2.0 ** -20, 0.0, -0.0, 3.140625, 7.0], (4, 1, 2))
    ref = tensor(np.arange(8) / 8.0, (4, 1, 2))
    exchanges.append((request(3, "predict_noise", 0, "", 0.3, 1.0, z2, ref), {"id": 3, "tensor": z2}))

    img = tensor(np.arange(16 * 8 * 3) % 256, (16, 8, 3))
    exchanges.append((request(4, "encode", t=img), {"id": 4, "tensor": tensor(np.zeros(8), (4, 2, 1))}))

    lat = tensor(np.zeros(8), (4, 1, 2))
    exchanges.append((request(5, "decode", t=lat), {"id": 5, "tensor": tensor(np.full(8 * 16 * 3, 128.0), (8, 16, 3))}))

    exchanges.append(
        (request(6, "train"), {"id": 6, "error": {"code": "unknown_op", "message": "unknown op 'train'"}})
    )

    with OUT.open("w") as f:
        for req, resp in exchanges:
            f.write("> " + frame(req) + "\n")
            f.write("< " + frame(resp) + "\n")
    print("wrote", OUT, len(exchanges), "exchanges")


if __name__ == "__main__":
    main()
