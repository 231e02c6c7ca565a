// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. `acceptance 3 5` runs only criteria 3 and 5.

#include "femtoq/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

namespace acc = femtoq::acceptance;
using femtoq::Paradigm;
using femtoq::RewardKind;
using femtoq::RewardSpec;

namespace {

// The smallest sweep that covers one criterion.
femtoq::SweepSpec sweep_for(int id)
{
    auto s = acc::criteria_sweep_spec();
    const RewardSpec rf1{RewardKind::RF1, acc::kTarget, 80.0};
    const RewardSpec rf3{RewardKind::RF3, acc::kTarget, 80.0};
    switch (id) {
    case 2:
        s.n_femto = {4};
        s.paradigms = {Paradigm::IL};
        s.rewards = {rf1};
        break;
    case 3:
        s.n_femto = {4};
        s.paradigms = {Paradigm::IL};
        s.rewards = {rf1, {RewardKind::RF2, acc::kTarget, 80.0}, {RewardKind::RF2, acc::kTarget, 10000.0}};
        break;
    case 4:
        s.paradigms = {Paradigm::IL};
        s.rewards = {rf1, rf3};
        break;
    case 5:
        s.n_femto = {11};
        s.rewards = {rf3};
        break;
    case 6:
        s.rewards = {rf1, rf3};
        break;
    case 7:
        s.n_femto = {4};
        s.rewards = {rf1};
        break;
    default: break;
    }
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> wanted;
    for (int k = 1; k < argc; ++k) {
        const int id = std::atoi(argv[k]);
        if (id < 1 || id > 8) {
            std::cerr << "usage: acceptance [criterion 1-8]...\n";
            return 2;
        }
        wanted.insert(id);
    }
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8};

    bool ok = true;
    auto report = [&](const acc::Criterion& c) {
        std::cout << acc::format(c) << std::endl;
        ok = ok && c.evaluated && c.pass;
    };
    for (int id : wanted) {
        if (id == 1) {
            report(acc::oracle_equivalence());
        } else if (id == 8) {
            report(acc::property_probes());
        } else {
            const auto result = femtoq::run_sweep(sweep_for(id));
            for (const auto& c : acc::sweep_criteria(result)) {
                if (c.id == id) report(c);
            }
        }
    }
    return ok ? 0 : 1;
}
