#include "qcnn/ansatz.hpp"

#include <charconv>
#include <stdexcept>

namespace qcnn {

namespace {

ParamSlot s(std::size_t i) { return ParamSlot{i}; }

} // namespace

std::string AnsatzSpec::name() const {
    return "a" + std::to_string(conv_id) + (pooling ? "-pool" : "-nopool");
}

void AnsatzSpec::validate() const {
    if (conv_id < 1 || conv_id > 9) {
        throw std::invalid_argument("convolution id must be 1..9, got " + std::to_string(conv_id));
    }
    if (n_qubits != 8 && n_qubits != 10 && n_qubits != 12) {
        throw std::invalid_argument("QCNN supports 8, 10 or 12 qubits, got " +
                                    std::to_string(n_qubits));
    }
}

AnsatzSpec parse_ansatz(std::string_view name, std::size_t n_qubits) {
    const auto bad = [&] {
        return std::invalid_argument("unknown ansatz '" + std::string(name) +
                                     "' (expected a1-pool .. a9-pool or a1-nopool .. a9-nopool)");
    };
    if (name.size() < 2 || name[0] != 'a') {
        throw bad();
    }
    const auto dash = name.find('-');
    if (dash == std::string_view::npos) {
        throw bad();
    }
    int id = 0;
    const auto digits = name.substr(1, dash - 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || id < 1 || id > 9) {
        throw bad();
    }
    const auto suffix = name.substr(dash + 1);
    if (suffix != "pool" && suffix != "nopool") {
        throw bad();
    }
    AnsatzSpec spec{id, suffix == "pool", n_qubits};
    spec.validate();
    return spec;
}

std::vector<AnsatzSpec> all_ansatzes(std::size_t n_qubits) {
    std::vector<AnsatzSpec> out;
    for (const bool pooling : {true, false}) {
        for (int id = 1; id <= 9; ++id) {
            out.push_back({id, pooling, n_qubits});
        }
    }
    return out;
}

Circuit build_conv_unit(int conv_id) {
    if (conv_id < 1 || conv_id > 9) {
        throw std::invalid_argument("convolution id must be 1..9, got " + std::to_string(conv_id));
    }
    constexpr std::size_t a = 0;
    constexpr std::size_t b = 1;
    CircuitBuilder c(2, kConvUnitParams[static_cast<std::size_t>(conv_id - 1)]);
    switch (conv_id) {
    case 1: // tree tensor network block
        c.ry(a, s(0)).ry(b, s(1)).cnot(a, b);
        break;
    case 2: // maximally entangling core with local rotations
        c.h(a).h(b).cz(a, b).ry(a, s(0)).ry(b, s(1));
        break;
    case 3:
        c.rx(a, s(0)).rx(b, s(1)).rz(a, s(2)).rz(b, s(3)).cnot(a, b);
        break;
    case 4:
        c.ry(a, s(0)).ry(b, s(1)).crz(b, a, s(2)).ry(a, s(3)).ry(b, s(4)).crz(a, b, s(5));
        break;
    case 5:
        c.ry(a, s(0)).ry(b, s(1)).crx(b, a, s(2)).ry(a, s(3)).ry(b, s(4)).crx(a, b, s(5));
        break;
    case 6: // real-valued two-body entangler
        c.ry(a, s(0)).ry(b, s(1)).cnot(a, b).ry(a, s(2)).ry(b, s(3)).cnot(b, a).ry(a, s(4)).ry(b, s(5));
        break;
    case 7:
    case 8: {
        const bool use_crx = conv_id == 8;
        auto entangle = [&](std::size_t ctrl, std::size_t tgt, std::size_t slot) {
            use_crx ? c.crx(ctrl, tgt, s(slot)) : c.crz(ctrl, tgt, s(slot));
        };
        c.rx(a, s(0)).rz(a, s(1)).rx(b, s(2)).rz(b, s(3));
        entangle(b, a, 4);
        c.rx(a, s(5)).rz(a, s(6)).rx(b, s(7)).rz(b, s(8));
        entangle(a, b, 9);
        break;
    }
    case 9: // general SU(4) up to global phase
        c.u3(a, s(0), s(1), s(2)).u3(b, s(3), s(4), s(5));
        c.cnot(b, a).rz(a, s(6)).ry(b, s(7)).cnot(a, b).ry(b, s(8)).cnot(b, a);
        c.u3(a, s(9), s(10), s(11)).u3(b, s(12), s(13), s(14));
        break;
    default:
        break;
    }
    return c.build();
}

Circuit build_pooling_unit() {
    constexpr std::size_t drop = 0;
    constexpr std::size_t keep = 1;
    CircuitBuilder c(2, kPoolingUnitParams);
    c.crz(drop, keep, s(0)).x(drop).crx(drop, keep, s(1)).discard(drop);
    return c.build();
}

std::vector<LayerPlan> layer_schedule(std::size_t n_qubits) {
    if (n_qubits < 2) {
        throw std::invalid_argument("layer_schedule needs at least two qubits");
    }
    std::vector<LayerPlan> plans;
    std::vector<std::size_t> active(n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        active[q] = q;
    }
    while (active.size() > 1) {
        LayerPlan plan;
        plan.active = active;
        const std::size_t k = active.size();
        if (k == 2) {
            plan.conv_pairs.emplace_back(active[0], active[1]);
            plan.pool_pairs.push_back({active[0], active[1]});
            plan.survivors = {active[1]};
        } else {
            for (std::size_t i = 0; i + 1 < k; i += 2) {
                plan.conv_pairs.emplace_back(active[i], active[i + 1]);
            }
            for (std::size_t i = 1; i + 1 < k; i += 2) {
                plan.conv_pairs.emplace_back(active[i], active[i + 1]);
            }
            plan.conv_pairs.emplace_back(active[k - 1], active[0]);
            for (std::size_t i = 0; i + 1 < k; i += 2) {
                plan.pool_pairs.push_back({active[i + 1], active[i]});
                plan.survivors.push_back(active[i]);
            }
            if (k % 2 == 1) {
                plan.survivors.push_back(active[k - 1]);
            }
        }
        active = plan.survivors;
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::size_t param_count(const AnsatzSpec &spec) {
    spec.validate();
    const std::size_t per_layer = kConvUnitParams[static_cast<std::size_t>(spec.conv_id - 1)] +
                                  (spec.pooling ? kPoolingUnitParams : 0);
    return per_layer * layer_schedule(spec.n_qubits).size();
}

Circuit build_qcnn(const AnsatzSpec &spec) {
    spec.validate();
    const Circuit conv = build_conv_unit(spec.conv_id);
    const Circuit pool = build_pooling_unit();
    const auto plans = layer_schedule(spec.n_qubits);

    CircuitBuilder c(spec.n_qubits, param_count(spec));
    std::size_t offset = 0;
    for (std::size_t layer = 0; layer < plans.size(); ++layer) {
        const auto &plan = plans[layer];
        const std::size_t tag_layer = layer + 1;
        for (const auto &[first, second] : plan.conv_pairs) {
            const std::size_t map[] = {first, second};
            c.append(conv, map, offset);
        }
        offset += conv.n_params();
        c.noise_point({LayerStage::Conv, tag_layer});
        if (spec.pooling) {
            for (const auto &pp : plan.pool_pairs) {
                const std::size_t map[] = {pp.discard, pp.keep};
                c.append(pool, map, offset, /*with_markers=*/false);
            }
            offset += pool.n_params();
            c.noise_point({LayerStage::Pool, tag_layer});
        }
        for (const auto &pp : plan.pool_pairs) {
            c.discard(pp.discard);
        }
        c.layer_end(tag_layer);
    }
    return c.build();
}

NoiseFilter noise_points(const AnsatzSpec &spec) {
    return NoiseFilter{true, spec.pooling};
}

} // namespace qcnn
