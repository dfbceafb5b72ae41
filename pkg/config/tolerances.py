import math

# Numerical tolerances
TOLERANCES = {
    'exact': 1e-12,
    'norm': 1e-10,
    'kennard_slack': 1e-3,
    'evasion_margin': 1e-6,
    'bias': 1e-8,
    'sector_floor': 1e-12,
    'boundary_support': 1e-12,
    'conservation': 1e-8,
}

# Grid resolution requirements (in grid spacings / packet widths)
GRID_DEFAULTS = {
    'min_points': 16,
    'gaussian_min_spacings': 4,
    'packet_min_spacings': 8,
    'boundary_sigmas': 6.0,
    'packet_truncation_sigmas': 3.0,
    'aperture_min_spacings': 8,
    'farfield_box_factor': 8.0,
    'preparation_box_factor': 20.0,
    'pointer_axis_points': 64,
    'max_two_body_points': 2 ** 24,
}

# Order-of-magnitude bands used to judge "~" estimates
PAPER_BANDS = {
    'box_product': (math.pi / 2, 4 * math.pi),      # in units of hbar
    'box_epsilon_fraction': (0.1, 1.0),             # epsilon(x1) / L
    'square_estimate_rel': 0.05,                    # <q^2> vs L^2/3
    'preparation_rel': 0.02,
    'farfield_rel': 0.05,
    'slit_width_warning': 10.0,                     # delta_l / reduced wavelength
    'classical_factor': 10.0,                       # rescaled product >> hbar
    'min_mass_ratio': 1e3,
}
