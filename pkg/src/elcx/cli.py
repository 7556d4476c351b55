"""Operator surface: file encryption, parameter reports, the diffusion
lab, the distinguisher, the reduction demo, and test-vector generation.

Every command is deterministic given its flags; seeds are flags with
defaults. Analysis reports print as text tables and can additionally be
written as CSV plus a rendered figure with --out-dir.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from pathlib import Path

from .bits import BitString
from .ciphers import get_cipher
from .container import ContainerError, ContainerHeader, build_container, parse_container
from .diffusion import (
    DEFAULT_SAMPLES,
    DEFAULT_THRESHOLD,
    RandomPermutationOracle,
    complete_diffusion_rounds,
    distinguish,
    influence_matrix,
)
from .engine import ElasticRoundMachine, encrypt, decrypt, init_params, perm_key_bits, rounds_at_level
from .keystream import expanded_key_for, expanded_key_from_material, layout_for
from .reduction import BruteForceOracle, make_planted_instance, reduce_to_cycle_keys, verify_cycle_keys


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elcx",
        description="variable-input-length elastic cipher engine and analysis lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encrypt", help="encrypt a file into a container")
    _crypt_flags(p)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a container back to a file")
    _crypt_flags(p)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("params", help="derived parameters for one message length")
    p.add_argument("--cipher", required=True, help="sp16 or sp8")
    p.add_argument("--len-bits", type=int, required=True, help="message length in bits")
    p.add_argument("--layout", action="store_true", help="print the key consumption layout")
    p.add_argument("--key-hex", default=None,
                   help="also dump the expanded key for this master key")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("diffusion", help="influence matrices and complete-diffusion search")
    p.add_argument("--cipher", required=True)
    p.add_argument("--level", type=int, default=1,
                   help="0 = bare cipher rounds, n >= 1 = elastic round body")
    p.add_argument("--y", type=int, default=None,
                   help="tail bits for level >= 1 (default: half the left part)")
    p.add_argument("--mode", choices=["sampled", "exhaustive"], default="sampled")
    p.add_argument("--rounds", type=int, default=6,
                   help="max round count to scan; 0 reports the identity matrix")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=None,
                   help="write influence.csv and influence.png here")
    p.set_defaults(func=cmd_diffusion)

    p = sub.add_parser("distinguish", help="probe a box for the elastic tail signature")
    p.add_argument("--fixture", choices=["weak-elastic", "full-elastic", "random-perm"],
                   default="weak-elastic")
    p.add_argument("--cipher", default="sp16")
    p.add_argument("--len-bits", type=int, default=24)
    p.add_argument("--trials", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=None,
                   help="write distinguish.csv and distinguish.png here")
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("reduce-demo", help="planted key-recovery reduction run")
    p.add_argument("--cipher", default="sp8")
    p.add_argument("--r", type=int, default=2, help="rounds / recovered cycle keys")
    p.add_argument("--s", type=int, default=4, help="number of pairs")
    p.add_argument("--y", type=int, default=2, help="tail bits of the reduced extension")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reduce_demo)

    p = sub.add_parser("vectors", help="emit the JSON test-vector corpus")
    p.add_argument("--emit", type=Path, required=True, help="output JSON path")
    p.set_defaults(func=cmd_vectors)

    return parser


def _crypt_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cipher", required=True, help="sp16 or sp8")
    p.add_argument("--key-hex", default=None, help="master key as hex octets")
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--out", dest="outfile", type=Path, required=True)
    p.add_argument("--raw-expanded-key", default=None, help=argparse.SUPPRESS)


def _expanded_key(args, params, spec):
    if args.raw_expanded_key is not None:
        material = BitString.from_hex(args.raw_expanded_key, params.lk)
        return expanded_key_from_material(material, params, spec)
    if args.key_hex is None:
        raise ValueError("--key-hex is required")
    return expanded_key_for(bytes.fromhex(args.key_hex), params, spec)


def cmd_encrypt(args) -> int:
    cipher = get_cipher(args.cipher)
    data = args.infile.read_bytes()
    if not data:
        raise ValueError("input file is empty")
    plain = BitString.from_bytes(data)
    params = init_params(len(plain), cipher.spec)
    ciphertext = encrypt(plain, _expanded_key(args, params, cipher.spec), cipher, params)
    header = ContainerHeader(args.cipher, params.n, len(ciphertext))
    args.outfile.write_bytes(build_container(header, ciphertext))
    print(f"encrypted {len(plain)} bits (n={params.n}, r={params.rn}) -> {args.outfile}")
    return 0


def cmd_decrypt(args) -> int:
    cipher = get_cipher(args.cipher)
    header, payload = parse_container(args.infile.read_bytes())
    if header.cipher != args.cipher:
        raise ContainerError(f"container was written with {header.cipher}, not {args.cipher}")
    params = init_params(header.payload_bits, cipher.spec)
    if header.level != params.n:
        raise ContainerError(f"container level {header.level} does not match length "
                             f"{header.payload_bits} (expects {params.n})")
    plain = decrypt(payload, _expanded_key(args, params, cipher.spec), cipher, params)
    args.outfile.write_bytes(plain.to_bytes())
    print(f"decrypted {len(plain)} bits -> {args.outfile}")
    return 0


def cmd_params(args) -> int:
    cipher = get_cipher(args.cipher)
    spec = cipher.spec
    params = init_params(args.len_bits, spec)
    print(f"n={params.n} y={params.y} r={params.rn} lK={params.lk}")
    print()
    print(spec.table())
    print()
    rows = [("block bits (b)", params.b),
            ("perm key bits (each of 2)", perm_key_bits(params.b))]
    rows += [(f"level-{m} rounds used", rounds_at_level(params, m, spec))
             for m in range(params.n + 1)]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    if args.key_hex is not None:
        ek = expanded_key_for(bytes.fromhex(args.key_hex), params, spec)
        print()
        print(f"expanded key ({params.lk} bits): {ek.material.to_hex()}")
        if args.layout:
            print()
            print(ek.table())
    elif args.layout:
        print()
        width = max(len(r.tag) for r in layout_for(params, spec))
        print(f"{'consumer':<{width}}  offset  bits")
        for rec in layout_for(params, spec):
            print(f"{rec.tag:<{width}}  {rec.offset:>6}  {rec.length:>4}")
    return 0


def _rounds_factory(cipher, level: int, y: int | None):
    """(factory(rounds, rng), width) for the requested analysis target."""
    spec = cipher.spec
    if level == 0:
        def factory(rounds, rng):
            keys = [rng.getrandbits(spec.lkr0) for _ in range(rounds)]

            def fn(state):
                for key in keys:
                    state = cipher.round_int(state, key)
                return state
            return fn
        return factory, spec.L
    left_bits = (1 << (level - 1)) * spec.L
    if y is None:
        y = left_bits // 2
    machine = ElasticRoundMachine(cipher, level, y)

    def factory(rounds, rng):
        keys = [(rng.getrandbits(machine.cycle_bits), rng.getrandbits(y))
                for _ in range(rounds)]
        return lambda state: machine.apply(state, keys)
    return factory, machine.width


def cmd_diffusion(args) -> int:
    cipher = get_cipher(args.cipher)
    factory, width = _rounds_factory(cipher, args.level, args.y)
    if args.rounds == 0:
        matrix = influence_matrix(lambda rng: (lambda s: s), width,
                                  mode=args.mode, samples=args.samples, seed=args.seed)
        print(f"identity fixture at 0 rounds over {width} bits")
    else:
        result = complete_diffusion_rounds(factory, width, args.rounds,
                                           mode=args.mode, samples=args.samples,
                                           seed=args.seed)
        for r, missing in enumerate(result.missing_by_round, start=1):
            print(f"rounds={r}: {missing} uninfluenced (input, output) pairs")
        if result.converged:
            print(f"complete diffusion after {result.rounds} rounds")
            if args.level == 0:
                cycles = -(-result.rounds // cipher.spec.x)
                print(f"({cycles} cycles of {cipher.spec.x} round(s))")
        else:
            print(f"not converged within {args.rounds} rounds")
        matrix = influence_matrix(lambda rng: factory(result.rounds, rng), width,
                                  mode=args.mode, samples=args.samples, seed=args.seed)
    print()
    print(matrix.table())
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = args.out_dir / "influence.csv"
        with csv_path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["i", "j", "flips", "contexts"])
            writer.writerows(matrix.csv_rows())
        from .plots import save_influence_heatmap
        png_path = args.out_dir / "influence.png"
        save_influence_heatmap(matrix, png_path,
                               title=f"{args.cipher} level {args.level}")
        print(f"\nwrote {csv_path} and {png_path}")
    return 0


def cmd_distinguish(args) -> int:
    cipher = get_cipher(args.cipher)
    spec = cipher.spec
    params = init_params(args.len_bits, spec)
    y = params.y
    rng = random.Random(args.seed)
    if args.fixture == "weak-elastic":
        machine = ElasticRoundMachine(cipher, params.n, y)
        keys = [(rng.getrandbits(machine.cycle_bits), rng.getrandbits(y))]
        box = lambda state: machine.apply(state, keys)
    elif args.fixture == "full-elastic":
        ek = expanded_key_for(rng.randbytes(16), params, spec)
        box = lambda state: encrypt(BitString.from_int(state, params.b),
                                    ek, cipher, params).to_int()
    else:
        box = RandomPermutationOracle(params.b, seed=args.seed)
    report = distinguish(box, params.b, y, trials=args.trials,
                         threshold=args.threshold, seed=args.seed)
    print(f"fixture: {args.fixture} over {args.cipher}, {params.b} bits, y={y}")
    print(report.table())
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = args.out_dir / "distinguish.csv"
        with csv_path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["bit", "p_flip", "near_half"])
            writer.writerows(report.csv_rows())
        from .plots import save_flip_profile
        png_path = args.out_dir / "distinguish.png"
        save_flip_profile(report, png_path, title=f"{args.fixture} ({args.cipher})")
        print(f"\nwrote {csv_path} and {png_path}")
    return 0


def cmd_reduce_demo(args) -> int:
    cipher = get_cipher(args.cipher)
    instance = make_planted_instance(cipher, 1, args.y, args.r, args.s, seed=args.seed)
    oracle = BruteForceOracle(cipher, 1)
    result = reduce_to_cycle_keys(instance.pairs, oracle, cipher, 1, args.y)
    verified = verify_cycle_keys(instance.pairs, result.cycle_keys, cipher, 0)
    good = sum(1 for _ in instance.pairs.pairs) if verified else 0
    print(f"recovered {len(result.cycle_keys)} cycle keys, "
          f"verified {good}/{args.s} pairs")
    print()
    print(result.cost.table())
    if not verified:
        raise RuntimeError("recovered keys failed re-encryption")
    return 0


_VECTOR_CASES = {
    "sp16": (17, 24, 32, 33, 48, 64, 100, 128),
    "sp8": (9, 10, 12, 16, 17, 24, 32),
}
_VECTOR_KEYS = ("0102030405", "00112233445566778899aabbccddeeff")


def cmd_vectors(args) -> int:
    entries = []
    for name, lengths in _VECTOR_CASES.items():
        cipher = get_cipher(name)
        for nbits in lengths:
            params = init_params(nbits, cipher.spec)
            for key_hex in _VECTOR_KEYS:
                ek = expanded_key_for(bytes.fromhex(key_hex), params, cipher.spec)
                seed = f"{name}:{nbits}:{key_hex}"
                plain = (BitString.zeros(nbits) if key_hex == _VECTOR_KEYS[0]
                         else BitString.random(nbits, random.Random(seed)))
                ciphertext = encrypt(plain, ek, cipher, params)
                entries.append({
                    "cipher": name,
                    "master_key": key_hex,
                    "plaintext": plain.to_hex(),
                    "plaintext_bits": nbits,
                    "ciphertext": ciphertext.to_hex(),
                    "ciphertext_bits": len(ciphertext),
                    "n": params.n,
                    "y": params.y,
                    "rounds": params.rn,
                    "key_bits": params.lk,
                })
    args.emit.parent.mkdir(parents=True, exist_ok=True)
    args.emit.write_text(json.dumps({"vectors": entries}, indent=2) + "\n")
    print(f"wrote {len(entries)} vectors to {args.emit}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
