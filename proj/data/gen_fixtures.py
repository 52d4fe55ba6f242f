#!/usr/bin/env python3
"""Writes the generated fixture problems under data/problems/.

Deterministic: rerunning reproduces the committed files byte for byte.
"""
import itertools
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent / "problems"


def atoms(xs):
    return "\n   ".join(xs)


def write(name, domain, init, tasks, goal):
    text = (f"(defproblem {name} {domain}\n"
            f"  ({atoms(init)})\n"
            f"  ({atoms(tasks)})\n"
            f"  ({atoms(goal)}))\n")
    (ROOT / f"{name}.prob").write_text(text)


def diff(objs):
    return [f"(Diff {a} {b})" for a, b in itertools.permutations(objs, 2)]


# --- blocks world -----------------------------------------------------------

def random_towers(rng, blocks):
    blocks = list(blocks)
    rng.shuffle(blocks)
    towers = []
    for b in blocks:
        if towers and rng.random() < 0.6:
            rng.choice(towers).append(b)
        else:
            towers.append([b])
    return towers


def blocks_state(towers):
    out = []
    for t in towers:
        out.append(f"(OnTable {t[0]})")
        out += [f"(On {a} {b})" for b, a in zip(t, t[1:])]
        out.append(f"(Clear {t[-1]})")
    return out


def blocksworld(index, rng):
    n = rng.randint(5, 8)
    blocks = "ABCDEFGH"[:n]
    start = random_towers(rng, blocks)
    goal = random_towers(rng, blocks)
    init = blocks_state(start) + ["(Space Table)"] + diff(blocks)
    tasks, goal_atoms = [], []
    for t in goal:
        tasks.append(f"(MakeOnTable {t[0]})")
        goal_atoms.append(f"(OnTable {t[0]})")
    # Bottom-up, level by level across towers.
    for level in range(1, max(len(t) for t in goal)):
        for t in goal:
            if level < len(t):
                tasks.append(f"(MakeOn {t[level]} {t[level - 1]})")
                goal_atoms.append(f"(On {t[level]} {t[level - 1]})")
    write(f"bw-{index:02d}", "blocksworld", init, tasks, goal_atoms)


# --- towers of hanoi --------------------------------------------------------

def hanoi(index, rng):
    n = 3 + (index - 1) % 5
    disks = [f"D{i}" for i in range(1, n + 1)]
    pegs = ["P1", "P2", "P3", "P4"]
    source, target = rng.sample(pegs, 2)
    init = []
    below = source
    for d in reversed(disks):
        init.append(f"(On {d} {below})")
        below = d
    init.append(f"(Top {source} {below})")
    init += [f"(Top {p} {p})" for p in pegs if p != source]
    init += [f"(Peg {p})" for p in pegs] + [f"(Disk {d})" for d in disks]
    for i, d in enumerate(disks):
        init += [f"(Smaller {d} {e})" for e in disks[i + 1:]]
        init += [f"(Smaller {d} {p})" for p in pegs]
    init += diff(pegs)
    tasks = [f"(MoveTower {disks[-1]} {source} {target})"]
    goal = [f"(On {disks[-1]} {target})"]
    goal += [f"(On {a} {b})" for a, b in zip(disks, disks[1:])]
    write(f"hanoi-{index:02d}", "hanoi", init, tasks, goal)


# --- rockets ----------------------------------------------------------------

def rockets(index, rng):
    locs = ["L1", "L2", "L3", "L4", "L5", "L6"]
    ncargo = rng.randint(10, 16)
    cargo = [f"C{i}" for i in range(1, ncargo + 1)]
    # Each origin serves one to three far locations.
    served = {o: rng.sample(locs[3:], rng.randint(1, 3)) for o in locs[:3]}
    origin = {c: rng.choice(locs[:3]) for c in cargo}
    dest = {c: rng.choice(served[origin[c]]) for c in cargo}
    # Exactly one single-flight rocket per (origin, destination) route in use.
    routes = sorted({(origin[c], dest[c]) for c in cargo})
    rocket_at = [o for o, _ in routes]
    rockets_ = [f"R{i}" for i in range(1, len(rocket_at) + 1)]
    init = [f"(Cargo {c})" for c in cargo] + [f"(Rocket {r})" for r in rockets_]
    init += [f"(At {c} {origin[c]})" for c in cargo]
    init += [f"(At {r} {l})" for r, l in zip(rockets_, rocket_at)] + [f"(Fuel {r})" for r in rockets_]
    init += [f"(Dest {c} {dest[c]})" for c in cargo]
    order = list(cargo)
    rng.shuffle(order)
    tasks = [f"(Deliver {c} {dest[c]})" for c in order]
    goal = [f"(At {c} {dest[c]})" for c in cargo]
    write(f"rk-{index:02d}", "rockets", init, tasks, goal)


def main():
    ROOT.mkdir(parents=True, exist_ok=True)
    for i in range(1, 13):
        blocksworld(i, random.Random(1000 + i))
        hanoi(i, random.Random(2000 + i))
        rockets(i, random.Random(3000 + i))


if __name__ == "__main__":
    main()
