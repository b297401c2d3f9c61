"""Static figures for the report directory."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata so repeated runs write identical files
_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def level_tables(chain, path):
    """One bar panel per support-uniform level, strings in ranked order."""
    dists = chain.support_uniform
    fig, axes = plt.subplots(len(dists), 1, figsize=(8, 2.4 * len(dists)), squeeze=False)
    for ax, d in zip(axes[:, 0], dists):
        ranked = d.ranked()
        ax.bar(range(len(ranked)), [c for _, c in ranked], color="0.35")
        ax.set_xticks(range(len(ranked)))
        ax.set_xticklabels([f"P{p}" for p, _ in ranked], rotation=60, fontsize=7)
        ax.set_ylabel("count")
        ax.set_title(f"w={d.level}: {len(ranked)} strings from {d.total}", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def image_chain(chain, M, path):
    sizes = chain.image_sizes
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(range(len(sizes)), sizes, "o-", color="k")
    for w, s in enumerate(sizes):
        ax.annotate(str(s), (w, s), textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.axvline(M, ls="--", color="0.5")
    ax.set_xlabel("meta-level w")
    ax.set_ylabel("|image(f^w)|")
    fig.tight_layout()
    return _save(fig, path)


def basins(report, path):
    items = sorted(report.basins.items(), key=lambda kv: (-kv[1], kv[0]))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar([f"P{p}" for p, _ in items], [c for _, c in items], color="0.35")
    for i, (_, c) in enumerate(items):
        ax.text(i, c, str(c), ha="center", va="bottom", fontsize=8)
    ax.set_ylabel("programs in basin")
    ax.set_title(f"Q={report.Q}, M={report.M}", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)
