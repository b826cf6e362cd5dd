"""Profile CSV plus a JSON sidecar with the log-linear fit of sup_dist against D."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from mpattractors.engine.omega import RateProfile
from mpattractors.errors import EmptyProfile


def loglinear_fit(profile: RateProfile) -> dict:
    """Least-squares fit log(sup_dist) = intercept + slope * D over the positive entries."""
    D, s = profile.depths, profile.sup_dists
    keep = s > 0
    if keep.sum() < 2 or np.ptp(D[keep]) == 0:
        return {"slope": None, "intercept": None, "r2": None, "n": int(keep.sum())}
    x, y = D[keep], np.log(s[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2, "n": int(keep.sum())}


def emit_profile_plotdata(profile: RateProfile, path) -> list[Path]:
    """Write ``path`` (CSV) and ``<stem>.plot.json``; returns both paths."""
    if not profile.entries:
        raise EmptyProfile("profile has no entries")
    path = Path(path)
    path.write_text(profile.to_csv(), encoding="utf-8", newline="")
    side = path.with_name(path.stem + ".plot.json")
    payload = {"target": profile.target, "fit": loglinear_fit(profile), "columns": ["D", "sup_dist", "direction_id"]}
    side.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return [path, side]
