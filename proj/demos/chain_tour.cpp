// Walks through the chain of normal subgroups between consecutive level
// stabilizers for a few groups and prints the module data behind it.
#include <iostream>

#include <treegrp/fpg_modules.hpp>
#include <treegrp/oracle.hpp>
#include <treegrp/spec_io.hpp>

using namespace treegrp;

namespace {

void tour(const std::string& preset, int depth) {
    const LoadedSpec S = load_preset(preset);
    const GroupInstance& G = S.group;
    const Subgroup Gn = quotient(G, depth);
    std::cout << "== " << preset << "  " << S.echo.dump() << "\n";
    std::cout << "   |G/St(" << depth << ")| = " << G.p() << "^" << Gn.exponent() << ", branch " << to_string(G.branch_type());
    if (!G.is_sunic()) std::cout << ", torsion " << G.is_torsion();
    std::cout << "\n";
    for (int m = 1; m < depth; ++m) {
        const RmResult R = compute_Rm(Gn, m);
        const auto ch = uniserial_chain(R.image, wm_module(G, m));
        std::cout << "   m=" << m << "  t(m)=" << R.t << "  top " << tuple_str(R.top) << "  uniserial " << ch.uniserial << "  image is V_j "
                  << R.matches_chain;
        if (R.t > 0 && R.t <= 6) std::cout << "  normal subgroups in between: " << oracle::brute_normal_between(Gn, m).subgroups.size();
        std::cout << "\n";
    }
}

}  // namespace

int main() {
    tour("fg3", 4);
    tour("fg5", 3);
    tour("remark-group", 3);
    tour("sunic-grigorchuk", 6);
    tour("gs3", 4);
    return 0;
}
