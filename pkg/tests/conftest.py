import hypothesis

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("default")


def all_domain_realizations():
    """Every lattice realization the simulators can run on."""
    from manhattan_sle import DOMAINS

    out = []
    for d in DOMAINS.values():
        out.append(d)
        if d.mirror_twin is not None:
            out.append(d.mirror_twin)
    return out
