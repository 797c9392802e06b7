"""Published reference values used by the ``verify`` command.

Hecke groups: dimension, cusp coefficients a_0..a_4 and flare coefficients
b_0..b_4 under the normalization a_0 = 1. Schottky groups (arc angle in
degrees): dimension and b_1 under b_0 = 1. Values are kept as strings so
they are parsed at the working precision.
"""

HECKE = {
    "0.35": {
        "delta": "0.767052417",
        "a": ["1.0", "1.3915582132", "1.042527677", "0.4185419039", "0.0082837207"],
        "b": ["0.5693837173", "-8.6593303021E-5", "2.7659692148E-10",
              "-2.1134025239E-14", "4.6505587029E-19"],
    },
    "0.40": {
        "delta": "0.8169416563",
        "a": ["1.0", "1.511667648", "0.5557801545", "-0.2633463357", "0.0563845298"],
        "b": ["0.5509892722", "-3.8018774819E-6", "-2.0592480594E-13",
              "-2.2707863778E-18", "8.2512318578E-25"],
    },
    "0.45": {
        "delta": "0.8782699772",
        "a": ["1.0", "1.383662851", "-0.4018405456", "-0.1590048682", "1.2672198274"],
        "b": ["0.5168430765", "-4.2062834491E-9", "-1.1328909449E-18",
              "2.1364421568E-26", "8.6040972875E-33"],
    },
}

SCHOTTKY = {
    94: ("0.5063972405", "-2.5166508538E-7"),
    95: ("0.5155835572", "-1.7300804172E-7"),
    96: ("0.5250520005", "-1.1617826121E-7"),
    97: ("0.5348189358", "-7.6013378206E-8"),
    98: ("0.5449022229", "-4.8314592354E-8"),
    99: ("0.5553214236", "-2.9729974038E-8"),
    100: ("0.5660980508", "-1.7639423974E-8"),
    101: ("0.5772558693", "-1.0043266514E-8"),
    102: ("0.5888212627", "-5.456246873E-9"),
    103: ("0.6008236865", "-2.8091147305E-9"),
    104: ("0.6132962338", "-1.3592086394E-9"),
    105: ("0.6262763513", "-6.117866583E-10"),
    106: ("0.6398067604", "-2.5291540896E-10"),
    107: ("0.6539366615", "-9.4495240438E-11"),
    108: ("0.6687233406", "-3.1254026951E-11"),
    109: ("0.6842343612", "-8.905490517E-12"),
    110: ("0.7005506322", "-2.1078083478E-12"),
    111: ("0.7177708377", "-3.9408565331E-13"),
    112: ("0.7360180662", "-5.4178437433E-14"),
    113: ("0.7554501793", "-4.9247119445E-15"),
    114: ("0.7762769358", "-2.5071014886E-16"),
    115: ("0.7987903036", "-5.418283051E-18"),
    116: ("0.823423288", "-2.9946987419E-20"),
    117: ("0.8508798156", "-1.4682715922E-23"),
    118: ("0.8824840727", "-4.1125246082E-29"),
    119: ("0.9215247961", "-1.2136119956E-41"),
    120: ("1.0", "0.0"),
}

# Arc angle at which the Schottky group has finite covolume: the constant
# function is the base eigenfunction, delta = 1 and all b_n (n >= 1) vanish.
SCHOTTKY_FINITE_VOLUME_DEG = 120

# Cases run by ``verify`` by default; the rest form the long sweep.
DEFAULT_CASES = {
    "hecke": ["0.35", "0.40", "0.45"],
    "schottky": [94, 100, 110, 120],
}

DELTA_TOL = "1e-8"
HECKE_COEFF_RTOL = "1e-6"
SCHOTTKY_B1_RTOL = "1e-4"
SCHOTTKY_B1_ATOL = "1e-12"
