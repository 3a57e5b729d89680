"""Declarative wiring of the whole device for the history oracle.

Each element is a node with numbered ports; ``links`` joins an output port
of one element to an input port of the next. Couplers go through (same port
index) or cross (other index). Rings absorb pump photons and emit pairs on
their output port. Nothing here computes an amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Tuple

from ..params import FanoutParams, SourceParams


@dataclass(frozen=True)
class Element:
    name: str
    kind: str  # coupler | phase | delay | ring | port
    values: tuple = ()


@dataclass
class Topology:
    elements: Dict[str, Element] = field(default_factory=dict)
    links: Dict[Tuple[str, int], Tuple[str, int]] = field(default_factory=dict)

    def add(self, name, kind, *values):
        if name in self.elements:
            raise ValueError(f"duplicate element {name}")
        self.elements[name] = Element(name, kind, tuple(values))
        return name

    def link(self, src: str, out_port: int, dst: str, in_port: int = 0):
        for end in (src, dst):
            if end not in self.elements:
                raise ValueError(f"link to undeclared element {end}")
        key = (src, out_port)
        if key in self.links:
            raise ValueError(f"output {key} already linked")
        self.links[key] = (dst, in_port)

    def chain(self, *names):
        for a, b in zip(names, names[1:]):
            self.link(a, 0, b, 0)


PUMP_INPUT = ("pump_dc", 0)
RINGS = ("ring1", "ring2", "ring3", "ring4")
CHANNEL_PORTS = ("ch1", "ch2", "ch3", "ch4")
DETECTORS = ("T", "D1,0", "D1,1", "D2,0", "D2,1", "D3,0", "D3,1")


def device_topology(src: SourceParams, fan: FanoutParams) -> Topology:
    """Pump splitter, two MZI blocks with a ring per arm, output couplers, fan-out."""
    g = Topology()
    t, r = src.t, src.r
    g.add("pump_dc", "coupler", t, r, 1)
    # block 1 is fed by the cross port, block 2 by the through port
    g.add("b1_L1", "delay", src.L1, 1)
    g.add("b2_phi", "phase", src.phi)
    g.add("b2_L1", "delay", src.L1, 1)
    g.link("pump_dc", 1, "b1_L1")
    g.link("pump_dc", 0, "b2_phi")
    g.chain("b2_phi", "b2_L1")

    g.add("b1_split", "coupler", t, r, 1)
    g.add("b2_split", "coupler", t, r, 1)
    g.link("b1_L1", 0, "b1_split", 0)
    g.link("b2_L1", 0, "b2_split", 0)

    g.add("phi1", "phase", src.phi1)
    g.add("phi2", "phase", src.phi2)
    for ring in RINGS:
        g.add(f"{ring}_L2", "delay", src.L2, 1)
        g.add(ring, "ring")
        g.add(f"{ring}_L3", "delay", src.L3, -1)
        g.link(f"{ring}_L2", 0, ring)
        g.link(ring, 0, f"{ring}_L3")
    g.link("b1_split", 1, "phi1")
    g.chain("phi1", "ring1_L2")
    g.link("b1_split", 0, "ring2_L2")
    g.link("b2_split", 0, "ring3_L2")
    g.link("b2_split", 1, "phi2")
    g.chain("phi2", "ring4_L2")

    g.add("b1_merge", "coupler", t, r, 1)
    g.add("b2_merge", "coupler", t, r, 1)
    g.link("ring1_L3", 0, "b1_merge", 0)
    g.link("ring2_L3", 0, "b1_merge", 1)
    g.link("ring3_L3", 0, "b2_merge", 0)
    g.link("ring4_L3", 0, "b2_merge", 1)
    for ch in CHANNEL_PORTS:
        g.add(ch, "port")
    g.link("b1_merge", 0, "ch1")
    g.link("b1_merge", 1, "ch2")
    g.link("b2_merge", 0, "ch3")
    g.link("b2_merge", 1, "ch4")

    for det in DETECTORS:
        g.add(det, "port")
    g.add("LT", "delay", fan.L_T, -1)
    g.link("ch1", 0, "LT")
    g.link("LT", 0, "T")
    # (channel, coupler, through detector/length/sign, cross detector/length/sign)
    arms = (
        ("ch2", "F1", (fan.t1, fan.r1), ("D2,0", fan.L20, -1), ("D3,0", fan.L30, -1)),
        ("ch3", "F2", (fan.t2, fan.r2), ("D1,1", fan.L11, -1), ("D3,1", fan.L31, -1)),
        ("ch4", "F3", (fan.t3, fan.r3), ("D1,0", fan.L10, fan.l10_sign), ("D2,1", fan.L21, -1)),
    )
    for ch, dc, (tn, rn), through, cross in arms:
        g.add(dc, "coupler", tn, rn, fan.sigma)
        g.link(ch, 0, dc, 0)
        for out_port, (det, length, sign) in enumerate((through, cross)):
            arm = f"{dc}_to_{det}"
            g.add(arm, "delay", length, sign)
            g.link(dc, out_port, arm)
            g.link(arm, 0, det)
    return g
