import io
import logging
from dataclasses import dataclass
from typing import Tuple

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.patches import Circle, Patch  # noqa: E402

from agent_sim import scenario_frame  # noqa: E402
from errors import DimensionMismatch  # noqa: E402

logger = logging.getLogger(__name__)

SVG_RC = {'svg.hashsalt': 'culturality', 'svg.fonttype': 'none'}
PT_PER_INCH = 72.0


@dataclass(frozen=True)
class Glyph:
    agent_id: int
    x: float
    y: float
    radius: float
    color: str
    cluster: int
    score: float


@dataclass(frozen=True)
class ClusterMap:
    glyphs: Tuple[Glyph, ...]
    width: float
    height: float

    def to_frame(self):
        return pd.DataFrame([glyph.__dict__ for glyph in self.glyphs])


def figure_to_svg(fig):
    """Serialize a figure to an SVG 1.1 string (byte-stable)"""
    buf = io.StringIO()
    with plt.rc_context(SVG_RC):
        fig.savefig(buf, format='svg', metadata={'Date': None})
    plt.close(fig)
    return buf.getvalue()


def _monotone_axis(scores, span, padding, jitter, rng):
    """Positions along one axis, decreasing with score

    The top score sits at `padding`, the lowest at padding + (1 - jitter) *
    span, and a seeded jitter of up to jitter * span is added. A running
    maximum in score order keeps positions monotone after jittering.
    """
    base = padding + (1.0 - scores) * (1.0 - jitter) * span
    raw = base + rng.random(len(scores)) * jitter * span
    order = np.argsort(-scores, kind='stable')
    pos = np.empty_like(raw)
    pos[order] = np.maximum.accumulate(raw[order])
    return pos


def layout_cluster_map(clustering,
                       scores,
                       societies,
                       hdi,
                       width=800,
                       height=800,
                       padding=40,
                       jitter=0.2,
                       seed=0):
    """Place one glyph per agent

    Args:
        clustering (Clustering): cluster assignments
        scores (array): per-agent transculturality scores
        societies (list): society id of each agent
        hdi (HdiConfig): colours by HDI bin
        width, height (float): canvas size
        padding (float): margin, also the largest glyph radius
        jitter (float): fraction of the canvas span used for jitter
        seed (int): jitter seed

    Returns:
        ClusterMap: glyphs; higher scores sit further up and left
    """
    scores = np.asarray(scores, dtype=np.float64)
    n = len(clustering.assignments)
    if len(scores) != n or len(societies) != n:
        raise DimensionMismatch('map scores / societies', n, len(scores))
    colors = [hdi.color(society) for society in societies]

    low, high = float(np.min(scores)), float(np.max(scores))
    norm = (scores - low) / (high - low) if high > low else np.ones(n)

    rng = np.random.default_rng(seed)
    xs = _monotone_axis(norm, width - 2 * padding, padding, jitter, rng)
    ys = _monotone_axis(norm, height - 2 * padding, padding, jitter, rng)

    sizes = clustering.sizes
    radii = padding * 0.5 * sizes / sizes.max()
    glyphs = tuple(
        Glyph(i, float(xs[i]), float(ys[i]), float(radii[c]), colors[i],
              int(c), float(scores[i]))
        for i, c in enumerate(clustering.assignments))
    return ClusterMap(glyphs, float(width), float(height))


def render_cluster_map(clustering,
                       scores,
                       hdi,
                       societies,
                       width=800,
                       height=800,
                       padding=40,
                       jitter=0.2,
                       seed=0):
    """Lay out and draw the cluster map

    Returns:
        tuple: (ClusterMap, SVG document as str)
    """
    cmap = layout_cluster_map(clustering, scores, societies, hdi, width,
                              height, padding, jitter, seed)

    fig = plt.figure(figsize=(width / PT_PER_INCH, height / PT_PER_INCH))
    ax = fig.add_axes([0, 0, 1, 1])
    ax.set_xlim(0, width)
    ax.set_ylim(height, 0)
    ax.set_axis_off()
    ax.plot([padding, width - padding], [padding, height - padding],
            color='#cccccc',
            lw=1,
            ls='--')
    for glyph in cmap.glyphs:
        ax.add_patch(
            Circle((glyph.x, glyph.y),
                   glyph.radius,
                   facecolor=glyph.color,
                   edgecolor='#333333',
                   lw=0.5,
                   alpha=0.75,
                   gid=f'agent-{glyph.agent_id}'))
    ax.text(padding, padding / 2, 'more transculturality', fontsize=10)
    ax.text(width - padding,
            height - padding / 4,
            'less transculturality',
            fontsize=10,
            ha='right')

    present = sorted(set(societies), key=lambda s: (hdi.bin(s), s))
    handles = [
        Patch(facecolor=hdi.color(s),
              label=f'{hdi.label(s)} (HDI {hdi.hdi[s]:.3f})') for s in present
    ]
    ax.legend(handles=handles, loc='upper right', fontsize=8, frameon=False)

    logger.info('Cluster map: %d glyphs, %d clusters', len(cmap.glyphs),
                clustering.k)
    return cmap, figure_to_svg(fig)


def render_trajectories(result, hdi=None):
    """Per-society mean factor over time with a min/max band

    Returns:
        str: SVG document
    """
    summary = scenario_frame(result)
    fig, ax = plt.subplots(figsize=(8, 5))
    for society, group in summary.groupby('society', sort=True):
        label = hdi.label(society) if hdi else society
        color = hdi.color(society) if hdi and society in hdi.hdi else None
        line, = ax.plot(group['step'], group['mean'], label=label,
                        color=color)
        ax.fill_between(group['step'],
                        group['min'],
                        group['max'],
                        color=line.get_color(),
                        alpha=0.15)
    for step in result.shift_steps:
        ax.axvline(step, color='k', ls=':', lw=1)
    ax.set_xlabel('Step', fontsize=12)
    ax.set_ylabel('Transcultural factor', fontsize=12)
    ax.set_title('Transcultural factor by society', fontsize=14)
    ax.legend(loc='best', fontsize=9)
    return figure_to_svg(fig)
