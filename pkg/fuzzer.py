from collections import Counter
import csv
import random
import signal

import foldsurf
from foldsurf.aod import MoveBatch, RearrangementPlan, apply_batch

# List of number of times to perform a given random perturbation -- in
# a more serious system this would be something like the result of a
# Poisson process, but here we just hard-code the probabilities
DISTRIBUTION = [0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 3, 3, 4]

# Largest jitter added to a translation, in doubled coordinates
MAX_JITTER = 4

DISTANCES = [3, 5, 7]

OUTPUT_FILE = "fuzzer.log"

# Handler for keyboard signals (for CTRL+C and CTRL+D)
class SIG_handler:
    def __init__(self):
        self.signal = False

    def signal_handler(self, signal, frame):
        print("SIGINT or SIGTERM received, ending execution.")
        self.signal = True


def perturbate_plan(plan, distribution=DISTRIBUTION):
    """
    Return a copy of `plan` with batches dropped, duplicated, swapped and
    jittered; the target is kept.
    """

    batches = list(plan.batches)
    ops = Counter()

    # Drop random batches
    for _ in range(random.choice(distribution)):
        if batches:
            batches.pop(random.randrange(len(batches)))
            ops["drop"] += 1

    # Duplicate random batches in place
    for _ in range(random.choice(distribution)):
        if batches:
            idx = random.randrange(len(batches))
            batches.insert(idx, batches[idx])
            ops["duplicate"] += 1

    # Swap two batches; not checking if they are the same
    for _ in range(random.choice(distribution)):
        if batches:
            idx_a = random.randrange(len(batches))
            idx_b = random.randrange(len(batches))
            batches[idx_a], batches[idx_b] = batches[idx_b], batches[idx_a]
            ops["swap"] += 1

    # Jitter translations, keeping them even so atoms stay on the lattice
    for _ in range(random.choice(distribution)):
        if batches:
            idx = random.randrange(len(batches))
            dx, dy = batches[idx].translation
            dx += 2 * random.randint(-MAX_JITTER // 2, MAX_JITTER // 2)
            dy += 2 * random.randint(-MAX_JITTER // 2, MAX_JITTER // 2)
            batches[idx] = MoveBatch(batches[idx].grid, (dx, dy))
            ops["jitter"] += 1

    return RearrangementPlan(batches, dict(plan.target)), ops


def replay(plan, sites):
    # Independent replay, ignoring violations
    occupancy = {site: site for site in sites}
    for batch in plan.batches:
        occupancy, _ = apply_batch(occupancy, batch)

    return {atom: site for site, atom in occupancy.items()}


def main():
    # Catches SIGINT and SIGTERM
    signal_handler = SIG_handler()
    signal.signal(signal.SIGINT, signal_handler.signal_handler)
    signal.signal(signal.SIGTERM, signal_handler.signal_handler)

    # Build the reference plans
    plans = {}
    for d in DISTANCES:
        layout = foldsurf.build_layout(d)
        plans[d] = (layout.qubits, foldsurf.plan_rotation(layout.qubits, layout.center))

    # Open logging file and write headers
    logger = open(OUTPUT_FILE, "w")
    writer = csv.DictWriter(
        logger,
        delimiter="\t",
        fieldnames=[
            "SUCCESS",
            "DISTANCE",
            "OPERATIONS",
            "BATCHES",
            "VIOLATIONS",
            "ACCEPTED",
            "MATCHES_REPLAY",
            "EXCEPTION",
        ],
    )
    writer.writeheader()

    # Main loop
    counter = 0
    errors = 0
    while True:
        counter += 1
        if counter % 10 == 0:
            print(f"Iteration #{counter}, {errors} error so far...")

        # Get a random starting plan and perturbate it
        d = random.choice(DISTANCES)
        sites, plan = plans[d]
        fuzz_plan, ops = perturbate_plan(plan)

        # Holder for this test data
        test = {
            "SUCCESS": True,
            "DISTANCE": d,
            "OPERATIONS": ",".join(f"{op}:{count}" for op, count in sorted(ops.items())),
            "BATCHES": len(fuzz_plan.batches),
            "VIOLATIONS": "",
            "ACCEPTED": "",
            "MATCHES_REPLAY": "",
            "EXCEPTION": "",
        }

        # An accepted plan must realize its target
        try:
            report = foldsurf.verify_plan(fuzz_plan, sites)
            permutation = replay(fuzz_plan, sites)
            matches = permutation == fuzz_plan.target
            test["VIOLATIONS"] = len(report.violations)
            test["ACCEPTED"] = report.accepted
            test["MATCHES_REPLAY"] = matches
            if report.accepted and not matches:
                test["SUCCESS"] = False
            if report.permutation != permutation:
                test["SUCCESS"] = False
        except Exception as e:
            if not isinstance(e, foldsurf.FoldSurfError):
                test["SUCCESS"] = False
            test["EXCEPTION"] = str(e)

        # Write results and update errors
        writer.writerow(test)
        if not test["SUCCESS"]:
            errors += 1

        # CTRL+C pressed or kill signal?
        if signal_handler.signal:
            break

    # Close logger file
    logger.close()


if __name__ == "__main__":
    main()
