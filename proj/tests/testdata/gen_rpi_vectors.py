#!/usr/bin/env python3
# Copyright 2026 The CoAvoid Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates rpi_vectors.tsv from an independent SHA-256 / AES-128 stack.

Uses hashlib and the `cryptography` package, after checking both against the
FIPS 180-4 and FIPS 197 known-answer vectors. Output columns:
hex DTK, interval, hex RPI.
"""
import hashlib
import random
import sys

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes


def aes128(key: bytes, block: bytes) -> bytes:
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


def self_check() -> None:
    # FIPS 180-4 example "abc"
    assert hashlib.sha256(b"abc").hexdigest() == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")
    # FIPS 197 appendix C.1
    key = bytes(range(16))
    pt = bytes.fromhex("00112233445566778899aabbccddeeff")
    assert aes128(key, pt).hex() == "69c4e0d86a7b0430d8cdb78070b4c55a"


def rpi(dtk: bytes, interval: int) -> bytes:
    rpik = hashlib.sha256(dtk + b"EN-RPIK").digest()[:16]
    padded = b"EN-RPI" + bytes(6) + interval.to_bytes(4, "big")
    return aes128(rpik, padded)


def main() -> None:
    self_check()
    rng = random.Random(20200809)
    dtks = [bytes(16), bytes(range(16)), bytes([0xff] * 16)]
    dtks += [bytes(rng.getrandbits(8) for _ in range(16)) for _ in range(5)]
    out = sys.stdout
    for dtk in dtks:
        for interval in (1, 2, 37, 48, 95, 96):
            out.write(f"{dtk.hex()}\t{interval}\t{rpi(dtk, interval).hex()}\n")


if __name__ == "__main__":
    main()
