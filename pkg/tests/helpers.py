"""Shared oracle harnesses for the test suite."""

from folijet.models import tangency_chart_u_coeffs
from folijet.oracle import BiJet, bicompose, binomial_chart_bijet


def factorization_residual(fp, table, rel=True):
    """Worst gluing-identity residual against the grid-substitution oracle."""
    k0 = table.k0
    vmin, vmax = -(2 * k0 + 6), 3 * k0 + 10
    worst = 0.0

    def global_grid(column, center):
        g = BiJet(center, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            g.embed_row(r, column[r - 1].expand_at(center, vmax))
        return g

    for i, sm in enumerate(fp.singular):
        c = sm.location
        a_g, b_g = global_grid(table.a_global, c), global_grid(table.b_global, c)
        psi = binomial_chart_bijet(c, sm.lam,
                                   [0] + [sm.s_coeff(r) for r in range(1, k0 + 1)],
                                   k0, vmin, vmax)
        v = BiJet.variable_v(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            v.set_term(r, 0, sm.s_coeff(r))
        eps_g = BiJet(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            eps_g.embed_row(r, fp.background.eps[i][r - 1])
        x_g = bicompose(eps_g, psi, v)
        a_comp = bicompose(a_g, x_g, v)
        b_comp = bicompose(b_g, x_g, v) + v
        for r in range(1, k0 + 1):
            for e in range(vmin, k0 + 2):
                for comp, col in ((a_comp, table.a_sing), (b_comp, table.b_sing)):
                    want = comp.coefficient(r, e)
                    got = col[i][r - 1].coefficient(e)
                    scale = max(1.0, abs(want)) if rel else 1.0
                    worst = max(worst, abs(want - got) / scale)
    for j, tm in enumerate(fp.tangency):
        c = tm.location
        a_g, b_g = global_grid(table.a_global, c), global_grid(table.b_global, c)
        phi_rows = tangency_chart_u_coeffs(tm, k0, max_exp=vmax + 2)
        v = BiJet.variable_v(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            v.embed_row(r, phi_rows[r - 1])
        x_unit = BiJet(c, k0, vmin, vmax)
        x_unit.set_term(1, 0, 1.0)
        sig_g = BiJet(c, k0, vmin, vmax)
        for r in range(1, k0 + 1):
            sig_g.embed_row(r, fp.background.sig[j][r - 1])
        x_g = bicompose(sig_g, x_unit, v)
        a_comp = bicompose(a_g, x_g, v)
        b_comp = bicompose(b_g, x_g, v) + v
        for r in range(1, k0 + 1):
            for e in range(vmin, k0 + 2):
                for comp, col in ((a_comp, table.a_tang), (b_comp, table.b_tang)):
                    want = comp.coefficient(r, e)
                    got = col[j][r - 1].coefficient(e)
                    scale = max(1.0, abs(want)) if rel else 1.0
                    worst = max(worst, abs(want - got) / scale)
    return worst
