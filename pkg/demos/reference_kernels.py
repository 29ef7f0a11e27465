# Cost breakdowns for the four bundled kernels on a lossy wide-area
# network, checked against their published reference numbers.

from lossybsp import evaluate_reference_row, reference_rows

header = f"{'kernel':<16} {'rounds':>8} {'serial s':>12} {'comm s':>10} {'total s':>10} {'speedup':>10} {'rel err':>8}"
print(header)
print("-" * len(header))
for row in reference_rows():
    report, errors = evaluate_reference_row(row)
    print(
        f"{row.label:<16} {report.expected_rounds:8.3f} {report.serial_seconds:12.2f}"
        f" {report.comm_seconds:10.2f} {report.total_seconds:10.2f}"
        f" {report.speedup:10.2f} {errors['speedup']:8.2%}"
    )

print()
print("published speedups for the same settings:")
for row in reference_rows():
    print(f"  {row.label:<16} {row.published.speedup:10.2f}")

# All four land within a few percent. The residual on the 2-D FFT traces
# to the bandwidth its row lists (17.07 MB/s) versus the transmit time the
# totals were evidently computed with; the other rows agree to fractions
# of a percent.
