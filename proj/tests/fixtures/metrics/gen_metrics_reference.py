#!/usr/bin/env python3
"""Generate metric cross-validation fixtures.

Writes 16-bit PCM reference/estimate pairs and reference.json holding the
scores computed by independent published implementations:
  - STOI:   pystoi.stoi (extended=False)
  - SI-SDR: torchmetrics.functional.scale_invariant_signal_distortion_ratio

Scores are computed on the dequantized int16 samples so the C++ side reads
exactly the same values.  Re-running the script reproduces the files.
"""
import json
import os

import numpy as np
import scipy.io.wavfile as wavfile
import scipy.signal as sps
import torch
from pystoi import stoi
from torchmetrics.functional.audio import scale_invariant_signal_distortion_ratio

FS = 16000
DUR = 2.5
HERE = os.path.dirname(os.path.abspath(__file__))


def speech_like(rng, n):
    t = np.arange(n) / FS
    f0 = 110 + 40 * rng.random() + 25 * np.sin(2 * np.pi * (0.5 + rng.random()) * t)
    phase = 2 * np.pi * np.cumsum(f0) / FS
    src = np.zeros(n)
    for h in range(1, 30):
        src += np.cos(h * phase) / h
    src += 0.05 * rng.standard_normal(n)
    out = np.zeros(n)
    for fc, bw in ((500 + 300 * rng.random(), 80), (1500 + 600 * rng.random(), 120),
                   (2500 + 500 * rng.random(), 160)):
        r = np.exp(-np.pi * bw / FS)
        a = [1, -2 * r * np.cos(2 * np.pi * fc / FS), r * r]
        out += sps.lfilter([1 - r], a, src)
    # syllabic envelope with pauses
    env = np.clip(np.sin(2 * np.pi * (3 + 2 * rng.random()) * t + rng.random() * 6), 0, None) ** 0.7
    gate = (np.sin(2 * np.pi * 0.6 * t + rng.random() * 6) > -0.6).astype(float)
    gate = sps.lfilter([0.01], [1, -0.99], gate)
    out *= env * gate
    return out / np.max(np.abs(out))


def quantize(x):
    q = np.clip(np.round(x * 32768.0), -32768, 32767).astype(np.int16)
    return q, q.astype(np.float64) / 32768.0


def at_snr(sig, noise, snr_db):
    ps = np.mean(sig ** 2)
    pn = np.mean(noise ** 2)
    return noise * np.sqrt(ps / (pn * 10 ** (snr_db / 10)))


def main():
    rng = np.random.default_rng(20221015)
    n = int(DUR * FS)
    refs = [0.6 * speech_like(rng, n) for _ in range(3)]
    pairs = []
    for i, ref in enumerate(refs):
        white = rng.standard_normal(n)
        other = refs[(i + 1) % len(refs)]
        lp_b, lp_a = sps.butter(4, 2000 / (FS / 2))
        brown = sps.lfilter([1], [1, -0.98], rng.standard_normal(n))
        pairs.append((f"r{i}_white5", ref + at_snr(ref, white, 5.0)))
        pairs.append((f"r{i}_babble0", ref + at_snr(ref, other, 0.0)))
        pairs.append((f"r{i}_lowpass", sps.lfilter(lp_b, lp_a, ref)))
        pairs.append((f"r{i}_brown10_half", 0.5 * ref + at_snr(0.5 * ref, brown, 10.0)))
    pairs.append(("r0_indep_noise", 0.2 * rng.standard_normal(n)))
    pairs.append(("r1_delay3_white10", np.roll(refs[1], 3) + at_snr(refs[1], rng.standard_normal(n), 10.0)))

    manifest = []
    qrefs = []
    for i, ref in enumerate(refs):
        q, deq = quantize(ref)
        wavfile.write(os.path.join(HERE, f"ref{i}.wav"), FS, q)
        qrefs.append(deq)
    for name, est in pairs:
        ri = int(name[1])
        peak = np.max(np.abs(est))
        if peak > 0.95:
            est = est * (0.95 / peak)
        q, deq = quantize(est)
        wavfile.write(os.path.join(HERE, f"{name}.wav"), FS, q)
        ref = qrefs[ri]
        stoi_val = float(stoi(ref, deq, FS, extended=False))
        sisdr = float(scale_invariant_signal_distortion_ratio(
            torch.from_numpy(deq), torch.from_numpy(ref), zero_mean=False))
        manifest.append({"reference": f"ref{ri}.wav", "estimate": f"{name}.wav",
                         "stoi": stoi_val, "si_sdr": sisdr})
    with open(os.path.join(HERE, "reference.json"), "w") as f:
        json.dump({"sample_rate": FS,
                   "stoi_impl": "pystoi 0.4.1 stoi(extended=False)",
                   "si_sdr_impl": "torchmetrics scale_invariant_signal_distortion_ratio(zero_mean=False)",
                   "pairs": manifest}, f, indent=2)


if __name__ == "__main__":
    main()
