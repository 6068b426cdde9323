import xml.etree.ElementTree as ET

import numpy as np
import pytest

from agent_sim import SimConfig, input_sizes, run, synthesize_population
from errors import MissingHdi
from plot_utils import (layout_cluster_map, render_cluster_map,
                        render_trajectories)
from report_utils import load_hdi
from similarity_cluster import cluster_kmedoids, similarity_matrix
from transcultural_model import default_coefficients


@pytest.fixture(scope='module')
def hdi():
    return load_hdi()


@pytest.fixture(scope='module')
def clustered(table):
    pop = synthesize_population(table, 60, seed=4)
    matrix = similarity_matrix(pop, pop.schema.weights)
    return pop, cluster_kmedoids(matrix, 4, seed=4)


def parse_svg(svg):
    root = ET.fromstring(svg.encode('utf-8'))
    assert root.tag.endswith('svg')
    assert root.get('version') == '1.1'
    return root


def test_single_agent_sits_top_left(hdi):
    clustering = cluster_kmedoids(np.ones((1, 1)), 1)
    cmap, svg = render_cluster_map(clustering, [0.3], hdi, ['Sample 1'])
    parse_svg(svg)
    glyph, = cmap.glyphs
    # jitter spans 20% of the 720 px drawing area
    assert 40 <= glyph.x <= 40 + 0.2 * 720
    assert 40 <= glyph.y <= 40 + 0.2 * 720
    assert glyph.radius == 20


def test_higher_score_is_above_and_left(hdi):
    clustering = cluster_kmedoids(np.array([[1.0, 0.2], [0.2, 1.0]]), 2)
    for seed in range(20):
        cmap = layout_cluster_map(clustering, [0.9, 0.1],
                                  ['Sample 1', 'Sample 2'], hdi, seed=seed)
        high, low = cmap.glyphs
        assert high.x < low.x and high.y < low.y


def test_positions_monotone_and_inside(clustered, hdi):
    pop, clustering = clustered
    scores = np.random.default_rng(0).random(len(pop))
    cmap = layout_cluster_map(clustering, scores, pop.societies, hdi, seed=3)
    order = np.argsort(-scores)
    xs = np.array([cmap.glyphs[i].x for i in order])
    ys = np.array([cmap.glyphs[i].y for i in order])
    assert np.all(np.diff(xs) >= 0) and np.all(np.diff(ys) >= 0)
    for glyph in cmap.glyphs:
        assert 0 <= glyph.x <= cmap.width and 0 <= glyph.y <= cmap.height
        assert glyph.radius > 0
    sizes = clustering.sizes
    assert {g.radius for g in cmap.glyphs} == {
        20 * s / sizes.max() for s in sizes
    }


def test_colors_follow_hdi_bins(clustered, hdi):
    pop, clustering = clustered
    cmap = layout_cluster_map(clustering, np.linspace(0, 1, len(pop)),
                              pop.societies, hdi)
    assert len({g.color for g in cmap.glyphs}) == 4
    for glyph, society in zip(cmap.glyphs, pop.societies):
        assert glyph.color == hdi.color(society)


def test_svg_is_well_formed_and_stable(clustered, hdi):
    pop, clustering = clustered
    scores = np.linspace(0, 1, len(pop))
    _, first = render_cluster_map(clustering, scores, hdi, pop.societies)
    _, second = render_cluster_map(clustering, scores, hdi, pop.societies)
    root = parse_svg(first)
    assert first == second
    ids = {el.get('id') for el in root.iter()}
    assert 'agent-0' in ids


def test_missing_hdi(clustered, hdi):
    pop, clustering = clustered
    societies = ['Elsewhere'] + list(pop.societies[1:])
    with pytest.raises(MissingHdi):
        render_cluster_map(clustering, np.zeros(len(pop)), hdi, societies)


def test_trajectory_chart(table, hdi):
    pop = synthesize_population(table, 20, seed=1)
    config = SimConfig(default_coefficients(*input_sizes(pop.schema)),
                       steps=10)
    result = run(pop, config)
    svg = render_trajectories(result, hdi)
    parse_svg(svg)
    assert svg == render_trajectories(result, hdi)
