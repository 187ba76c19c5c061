import xml.etree.ElementTree as ET

import numpy as np

from boussinesq1d import plots


def parse(svg):
    return ET.fromstring(svg)


def test_figure_is_valid_svg_and_deterministic():
    fig = plots.Figure("t<itle> & co", "x", "y").add([0, 1, 2], [1, 4, 9], "sq").add([0, 2], [0, 0], "flat", dashed=True)
    a, b = fig.to_svg(), fig.to_svg()
    assert a == b
    root = parse(a)
    assert root.tag.endswith("svg")
    assert len(root.findall("{http://www.w3.org/2000/svg}polyline")) == 2


def test_log_scale_drops_nonpositive_values():
    fig = plots.Figure("log", "t", "v", logy=True).add([0, 1, 2, 3], [0, 1, 10, np.nan], "v")
    pts = parse(fig.to_svg()).find("{http://www.w3.org/2000/svg}polyline").get("points").split()
    assert len(pts) == 2


def test_empty_and_constant_series():
    parse(plots.Figure("empty", "x", "y").to_svg())
    parse(plots.Figure("flat", "x", "y").add([0, 1], [3, 3], "c").to_svg())


def test_scenario_figures(tmp_path):
    t = np.linspace(0, 1, 5)
    plots.sup_omega_figure(t, [1, 2, 4, 8, 16], flag_time=0.9).save(tmp_path / "a.svg")
    Phi = np.array([np.linspace(0.3, 0.1, 5), np.linspace(0.29, 0.05, 5)])
    plots.characteristics_figure(t, Phi).save(tmp_path / "b.svg")
    plots.psi_figure(t, -np.log(Phi), [1.0, 1.5]).save(tmp_path / "c.svg")
    plots.recursion_figure([1, 2, 3], [9, 28.1, 1e9], 700.0).save(tmp_path / "d.svg")
    for name in "abcd":
        parse((tmp_path / f"{name}.svg").read_text())
