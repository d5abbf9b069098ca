"""Regenerate the small synthetic fixtures in src/smote_lab/data.

They mimic the schema of the real datasets (which are not redistributed):
  housing_fixture.csv      California Housing CSV layout, 2000 rows
  air_quality_fixture.csv  UCI Air Quality export: ';' separated, decimal
                           comma, -200 for missing, blank trailing rows
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "smote_lab" / "data"


def housing(rng, rows=2000):
    income = np.clip(np.round(rng.lognormal(1.3, 0.45, rows), 4), 0.4999, 15.0001)
    lines = ["longitude,latitude,housing_median_age,total_rooms,total_bedrooms,"
             "population,households,median_income,median_house_value,ocean_proximity"]
    prox = ["NEAR BAY", "<1H OCEAN", "INLAND", "NEAR OCEAN"]
    for inc in income:
        rooms = int(rng.integers(200, 6000))
        lines.append(",".join([
            f"{rng.uniform(-124.3, -114.3):.2f}", f"{rng.uniform(32.5, 42.0):.2f}",
            f"{float(rng.integers(1, 53)):.1f}", f"{float(rooms):.1f}",
            f"{float(rooms // 5):.1f}", f"{float(rng.integers(100, 4000)):.1f}",
            f"{float(rng.integers(50, 1500)):.1f}", f"{inc:.4f}",
            f"{min(500001.0, round(inc * 40000 + rng.normal(0, 30000), -2)):.1f}",
            prox[int(rng.integers(len(prox)))],
        ]))
    (OUT / "housing_fixture.csv").write_text("\n".join(lines) + "\n")


def air_quality(rng, rows=400):
    header = ("Date;Time;CO(GT);PT08.S1(CO);NMHC(GT);C6H6(GT);PT08.S2(NMHC);NOx(GT);"
              "PT08.S3(NOx);NO2(GT);PT08.S4(NO2);PT08.S5(O3);T;RH;AH;;")
    lines = [header]
    for r in range(rows):
        day, hour = divmod(r + 18, 24)
        co = "-200" if rng.random() < 0.08 else f"{max(0.1, rng.gamma(2.2, 1.0)):.1f}".replace(".", ",")
        t = f"{rng.normal(18, 6):.1f}".replace(".", ",")
        rh = f"{rng.uniform(10, 90):.1f}".replace(".", ",")
        ah = f"{rng.uniform(0.2, 2.2):.4f}".replace(".", ",")
        c6 = f"{rng.gamma(2, 4):.1f}".replace(".", ",")
        ints = [int(rng.integers(600, 2000)) for _ in range(7)]
        lines.append(f"{10 + day:02d}/03/2004;{hour:02d}.00.00;{co};{ints[0]};-200;{c6};{ints[1]};"
                     f"{ints[2] // 5};{ints[3]};{ints[4] // 10};{ints[5]};{ints[6]};{t};{rh};{ah};;")
    lines += [";;;;;;;;;;;;;;;;"] * 3
    (OUT / "air_quality_fixture.csv").write_text("\r\n".join(lines) + "\r\n")


if __name__ == "__main__":
    rng = np.random.default_rng(20241018)
    OUT.mkdir(parents=True, exist_ok=True)
    housing(rng)
    air_quality(rng)
