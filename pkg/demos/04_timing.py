# Where the three-body time goes.
#
# A scaled-down version of the full benchmark (configs/bench.cfg): 8000
# molecules on a simple cubic start, two iterations, two repetitions.
# 3c08 visits fewer cell triplets than 3c18, which skips the redundant work
# of 3c01; the product cutoff accepts more triplets, so it costs more.

import tempfile

from tricell.harness import BenchConfig, run_benchmark

out = tempfile.mkdtemp(prefix="bench_")
cfg = BenchConfig.from_text(f"""
N = 8000
box = 22.5
iterations = 2
repetitions = 2
output = {out}/bench.csv
""")
report = run_benchmark(cfg)
report.write(cfg.output)

print(f"{'traversal':9s} {'cutoff':8s} {'3-body s':>9s} {'MMUPS':>8s} {'hitrate':>8s}")
for r in report.rows:
    print(f"{r.traversal.value:9s} {r.cutoff.value:8s} {r.wall_seconds:9.3f} {r.mmups:8.4f} {r.hitrate:7.2f}%")
print(f"\nfull table in {cfg.output}")
