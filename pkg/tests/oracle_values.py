"""Frozen reference values produced by tests/gen_oracles.py (mpmath, 30 digits)."""

F_UNIT = {
    complex(0.8, 0.1): complex(0.020046887975009375163, 0.00626845291480874762),
    complex(0.3, -0.7): complex(-0.19119394136088455602, 0.11270098041743781788),
    complex(1.4, 0.2): complex(0.042914401297578575332, -0.0026183919883029383),
    complex(0.5, 0.0): complex(0.0043313488091389046338, 0.0),
}

S_AT_RESONANCE = {
    0: complex(1.4805674355782869064, 0.0),
    1: complex(70.834640961938594405, 0.0),
    2: complex(141317.82027967824836, 0.0),
}

RESIDUE_CLOSED_FORM = {
    0: complex(0.0, 0.0022260573111575985621),
    1: complex(0.0, 0.9585093522029470122),
    2: complex(0.0, 5311.8412486825124762),
}

RESIDUE_STATED = {
    0: complex(-0.015422577453940488608, 0.0),
    1: complex(-6.6407475901817432254, 0.0),
    2: complex(-36801.515697832877178, 0.0),
}

LOG_JUMP_F = {
    complex(1.0392304845413263761, -0.69282032302755091741): complex(-0.0013886872677838967571, -0.00039336967953872018769),
    complex(0.51961524227066318806, -1.2124355652982141055): complex(0.0050856016581692574345, 0.00088557411492795210483),
}
