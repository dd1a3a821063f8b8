from dgforge.dgcore import free_module, quotient_by_indices


def simple_over(a, label="S"):
    """A/A^{>=1} as a quotient of the free module (classP corpus algebras)."""
    free = free_module(a)
    killed = [i for i in range(free.dim) if free.degrees[i] > 0]
    s, _ = quotient_by_indices(free, killed, label=label)
    return s
