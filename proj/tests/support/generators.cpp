#include "generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace alurity::testing {

namespace {

int uniform(std::mt19937& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(std::mt19937& rng, double p) {
    return std::bernoulli_distribution(p)(rng);
}

class NamePool {
public:
    NamePool(std::mt19937& rng, bool tricky) : rng_(rng), tricky_(tricky) {}

    std::string next(std::string_view stem) {
        static const std::vector<std::string> awkward{"true", "null", "123", "1e5", "on", "a.b", "x_y", "0x1F", "No"};
        if (tricky_ && chance(rng_, 0.2)) {
            const auto& pick = awkward[uniform(rng_, 0, static_cast<int>(awkward.size()) - 1)];
            if (used_.insert(pick).second) {
                return pick;
            }
        }
        std::string name;
        do {
            name = std::string(stem) + std::to_string(uniform(rng_, 0, 999));
            if (chance(rng_, 0.3)) {
                name += chance(rng_, 0.5) ? "-net" : "_x.y";
            }
        } while (!used_.insert(name).second);
        return name;
    }

private:
    std::mt19937& rng_;
    bool tricky_;
    std::set<std::string> used_;
};

std::string free_text(std::mt19937& rng, bool tricky) {
    static const std::vector<std::string> plain{"roscore", "sleep 3", "rostopic echo /chatter", "ls -la", "cd /home/alias"};
    static const std::vector<std::string> awkward{
        "export URI=\"http://12.0.0.2:11311\"",
        "echo 'a: b' # not a comment",
        "wireshark -i eth0 . &",
        "- dash first",
        "trailing colon:",
        "tab\there",
        "back\\slash",
        "  padded  ",
        "true",
        "multi\nline",
        "{braces}",
        "ünïcödé",
    };
    if (tricky && chance(rng, 0.4)) {
        return awkward[uniform(rng, 0, static_cast<int>(awkward.size()) - 1)];
    }
    return plain[uniform(rng, 0, static_cast<int>(plain.size()) - 1)];
}

ModuleRef random_ref(std::mt19937& rng) {
    static const std::vector<std::string> registries{"registry.gitlab.com", "localhost:5000", "ghcr.io", ""};
    static const std::vector<std::string> prefixes{"robo_", "comp_", "expl_", "reco_", "deve_", "fore_", "test_", "xyz_"};
    ModuleRef ref;
    ref.registry = registries[uniform(rng, 0, static_cast<int>(registries.size()) - 1)];
    std::string leaf = prefixes[uniform(rng, 0, static_cast<int>(prefixes.size()) - 1)] + "tool" +
                       std::to_string(uniform(rng, 0, 99));
    ref.path = chance(rng, 0.5) ? "aliasrobotics/offensive/alurity/" + leaf : leaf;
    if (ref.registry.empty()) {
        ref.path = leaf;
    }
    if (chance(rng, 0.85)) {
        static const std::vector<std::string> tags{"latest", "3.13.0", "melodic-scenario", "1"};
        ref.tag = tags[uniform(rng, 0, static_cast<int>(tags.size()) - 1)];
    }
    return ref;
}

} // namespace

Flow random_flow(std::mt19937& rng, const Scenario& scenario, bool tricky_text) {
    Flow flow;
    for (const auto& ep : endpoints(scenario)) {
        if (!chance(rng, 0.5)) {
            continue;
        }
        FlowSpec spec{ep.name, ep.kind, {}, std::nullopt};
        const int windows = uniform(rng, 0, 3);
        for (int w = 0; w < windows; ++w) {
            WindowSpec window{"w" + std::to_string(w) + (chance(rng, 0.3) ? "-x" : ""), {}};
            const int items = uniform(rng, 0, 6);
            for (int i = 0; i < items; ++i) {
                if (chance(rng, 0.25)) {
                    window.items.emplace_back(
                        Split{chance(rng, 0.5) ? SplitDirection::horizontal : SplitDirection::vertical});
                } else {
                    window.items.emplace_back(Command{free_text(rng, tricky_text), chance(rng, 0.1)});
                }
            }
            spec.windows.push_back(std::move(window));
        }
        if (!spec.windows.empty() && chance(rng, 0.5)) {
            spec.selected_window = spec.windows[uniform(rng, 0, static_cast<int>(spec.windows.size()) - 1)].name;
        }
        flow.push_back(std::move(spec));
    }
    return flow;
}

Scenario random_scenario(std::mt19937& rng, const GeneratorOptions& options) {
    Scenario s;
    NamePool names(rng, options.tricky_text);

    const int network_count = uniform(rng, 0, options.max_networks);
    std::vector<int> second_octets(200);
    std::iota(second_octets.begin(), second_octets.end(), 1);
    std::shuffle(second_octets.begin(), second_octets.end(), rng);
    for (int i = 0; i < network_count; ++i) {
        NetworkSpec net;
        net.name = names.next("net");
        net.driver = "overlay";
        net.internal = chance(rng, 0.5);
        net.encryption = chance(rng, 0.3);
        const int prefix = uniform(rng, 16, 28);
        const std::uint32_t block = std::uint32_t{1} << (32 - prefix);
        const std::uint32_t offset = static_cast<std::uint32_t>(uniform(rng, 0, (1 << (prefix - 16)) - 1)) * block;
        const std::uint32_t base = (10u << 24) | (static_cast<std::uint32_t>(second_octets[i]) << 16);
        net.subnet = Ipv4Cidr{Ipv4Address{base + offset}, prefix};
        s.networks.push_back(std::move(net));
    }

    const int endpoint_count = uniform(rng, 0, options.max_endpoints);
    std::set<std::uint32_t> manual;
    for (int i = 0; i < endpoint_count; ++i) {
        std::vector<std::string> attached;
        for (const auto& net : s.networks) {
            if (chance(rng, 0.45)) {
                attached.push_back(net.name);
            }
        }
        std::shuffle(attached.begin(), attached.end(), rng);
        std::optional<Ipv4Address> ip;
        if (!attached.empty() && chance(rng, 0.3)) {
            const auto& subnet = s.find_network(attached.front())->subnet;
            const auto lo = subnet.first_host().value() + 1;
            const auto hi = subnet.last_host().value();
            for (int attempt = 0; attempt < 8 && !ip; ++attempt) {
                const auto candidate = lo + static_cast<std::uint32_t>(uniform(rng, 0, static_cast<int>(hi - lo)));
                if (manual.insert(candidate).second) {
                    ip = Ipv4Address{candidate};
                }
            }
        }
        std::optional<long long> cpus;
        std::optional<long long> memory;
        if (chance(rng, 0.6)) {
            cpus = uniform(rng, 1, 16);
        }
        if (chance(rng, 0.6)) {
            memory = 256LL * uniform(rng, 1, 32);
        }

        if (!options.vms || chance(rng, 0.7)) {
            ContainerSpec c;
            c.name = names.next("ct");
            c.base = random_ref(rng);
            const int volumes = uniform(rng, 0, 3);
            for (int v = 0; v < volumes; ++v) {
                c.volumes.push_back(random_ref(rng));
            }
            c.networks = std::move(attached);
            c.ip = ip;
            c.cpus = cpus;
            c.memory = memory;
            if (chance(rng, 0.3)) {
                c.extra_options = chance(rng, 0.5) ? "ALL" : free_text(rng, options.tricky_text);
            }
            s.containers.push_back(std::move(c));
        } else {
            VmSpec v;
            v.name = names.next("vm");
            v.path = chance(rng, 0.5) ? "$(pwd)/vms/" + v.name : "/srv/vm images/" + v.name;
            v.networks = std::move(attached);
            v.ip = ip;
            v.cpus = cpus;
            v.memory = memory;
            s.vms.push_back(std::move(v));
        }
    }
    if (options.flows) {
        s.flows = random_flow(rng, s, options.tricky_text);
    }
    return s;
}

} // namespace alurity::testing
