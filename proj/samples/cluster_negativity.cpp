// Builds the four-qubit cluster for |psi_in> = (|0> + |1>)/sqrt2, sends it through each
// local noise channel and prints the negativity across the qubit-1 cut, plus the
// onset of entanglement sudden death where one exists.

#include "clusterq/channels.hpp"
#include "clusterq/entanglement.hpp"
#include "clusterq/states.hpp"

#include <cstdio>
#include <numbers>

int main() {
    using namespace clusterq;
    const InitialState input{std::numbers::pi / 4, 0.0};
    const DensityMatrix cluster = build_cluster(input);
    const QubitSet cut{1};

    std::printf("%-10s", "p");
    for (ChannelKind kind : {ChannelKind::Dephasing, ChannelKind::AmplitudeDamping, ChannelKind::Depolarizing})
        std::printf("%-18s", to_string(kind));
    std::printf("\n");
    for (int k = 0; k <= 10; ++k) {
        const double p = k / 10.0;
        std::printf("%-10.1f", p);
        for (ChannelKind kind : {ChannelKind::Dephasing, ChannelKind::AmplitudeDamping, ChannelKind::Depolarizing})
            std::printf("%-18.6f", negativity(apply_channel(cluster, four_qubit_channel(kind, p)), cut).value);
        std::printf("\n");
    }
    for (ChannelKind kind : {ChannelKind::Dephasing, ChannelKind::AmplitudeDamping, ChannelKind::Depolarizing}) {
        const auto onset = esd_threshold(kind, cut, input, 1e-8);
        if (onset)
            std::printf("%s: entanglement vanishes at p = %.6f\n", to_string(kind), *onset);
        else
            std::printf("%s: no sudden death\n", to_string(kind));
    }
}
