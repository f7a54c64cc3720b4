#include "modsynth/modlib.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "modsynth/errors.hpp"

namespace modsynth {

namespace {

void require(bool condition, const std::string& what)
{
    if (!condition) {
        throw Error(what);
    }
}

bool is_rotation(const Transform& t)
{
    const Mat3 r = t.linear();
    return (r * r.transpose() - Mat3::Identity()).norm() < 1e-6 && r.determinant() > 0.0;
}

}  // namespace

const char* to_string(ModuleKind kind)
{
    switch (kind) {
    case ModuleKind::base:
        return "base";
    case ModuleKind::regular:
        return "regular";
    case ModuleKind::end_effector:
        return "end_effector";
    }
    return "?";
}

const char* to_string(JointKind kind)
{
    return kind == JointKind::revolute ? "revolute" : "prismatic";
}

void Module::validate() const
{
    const std::string where = "module " + std::to_string(id) + " (" + name + "): ";
    require(id > 0, where + "id must be positive");
    require(!bodies.empty(), where + "needs at least one body");
    require(joints.size() + 1 == bodies.size(), where + "b bodies need exactly b-1 joints");
    for (const auto& body : bodies) {
        require(body.mass >= 0.0, where + "negative mass");
        require((body.inertia - body.inertia.transpose()).norm() < 1e-9, where + "inertia not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat3> eig(body.inertia);
        require(eig.eigenvalues().minCoeff() >= -1e-9, where + "inertia not positive semidefinite");
        for (const auto& g : body.geometry) {
            g.validate();
        }
    }
    for (const auto& j : joints) {
        require(std::abs(j.axis.norm() - 1.0) < 1e-9, where + "joint axis must be a unit vector");
        require(j.q_limits.lo <= j.q_limits.hi, where + "q_lo > q_hi");
        require(j.qd_limits.lo < 0.0 && 0.0 < j.qd_limits.hi, where + "velocity limits must bracket zero");
        require(j.qdd_limits.lo < 0.0 && 0.0 < j.qdd_limits.hi, where + "acceleration limits must bracket zero");
        require(j.tau_max > 0.0, where + "tau_max must be positive");
        require(is_rotation(j.parent_frame) && is_rotation(j.child_frame), where + "joint frames must be rigid");
    }
    require(!proximal.type.empty() && !distal.type.empty(), where + "connector types required");
    require(is_rotation(proximal.frame) && is_rotation(distal.frame), where + "connector frames must be rigid");
}

ModuleLibrary::ModuleLibrary(std::vector<Module> modules, std::vector<ConnectorType> connector_types)
    : connector_types_(std::move(connector_types))
{
    std::sort(modules.begin(), modules.end(), [](const Module& a, const Module& b) { return a.id < b.id; });
    for (auto& m : modules) {
        m.validate();
        if (gene_by_id_.count(m.id) != 0) {
            throw Error("duplicate module id " + std::to_string(m.id));
        }
        gene_by_id_[m.id] = static_cast<int>(modules_.size()) + 1;
        modules_.push_back(std::make_shared<const Module>(std::move(m)));
    }
    if (!connector_types_.empty()) {
        auto known = [&](const std::string& t) {
            return std::any_of(connector_types_.begin(), connector_types_.end(),
                               [&](const ConnectorType& c) { return c.id == t; });
        };
        for (const auto& m : modules_) {
            if (!known(m->proximal.type) || !known(m->distal.type)) {
                throw Error("module " + std::to_string(m->id) + " uses an undeclared connector type");
            }
        }
    }
}

const Module& ModuleLibrary::by_id(int id) const
{
    return *ptr_by_id(id);
}

ModulePtr ModuleLibrary::ptr_by_id(int id) const
{
    return modules_.at(static_cast<std::size_t>(gene_of(id) - 1));
}

int ModuleLibrary::gene_of(int id) const
{
    auto it = gene_by_id_.find(id);
    if (it == gene_by_id_.end()) {
        throw Error("unknown module id " + std::to_string(id));
    }
    return it->second;
}

int ModuleLibrary::id_of_gene(int gene) const
{
    if (gene < 1 || gene > static_cast<int>(modules_.size())) {
        throw Error("gene value out of range: " + std::to_string(gene));
    }
    return modules_[static_cast<std::size_t>(gene - 1)]->id;
}

std::vector<int> ModuleLibrary::ids_of_kind(ModuleKind kind) const
{
    std::vector<int> out;
    for (const auto& m : modules_) {
        if (m->kind == kind) {
            out.push_back(m->id);
        }
    }
    return out;
}

bool can_connect(const Module& a, const Module& b)
{
    // End effectors terminate a chain and bases start one.
    if (a.kind == ModuleKind::end_effector || b.kind == ModuleKind::base) {
        return false;
    }
    return a.distal.type == b.proximal.type;
}

bool is_valid_sequence(const ModuleLibrary& library, std::span<const int> ids)
{
    if (ids.size() < 2) {
        return false;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!library.contains(ids[i])) {
            return false;
        }
        const auto kind = library.by_id(ids[i]).kind;
        const auto expected = i == 0 ? ModuleKind::base
                              : i + 1 == ids.size() ? ModuleKind::end_effector
                                                    : ModuleKind::regular;
        if (kind != expected) {
            return false;
        }
        if (i > 0 && !can_connect(library.by_id(ids[i - 1]), library.by_id(ids[i]))) {
            return false;
        }
    }
    return true;
}

std::vector<int> Assembly::module_ids() const
{
    std::vector<int> ids;
    ids.reserve(modules_.size());
    for (const auto& m : modules_) {
        ids.push_back(m->id);
    }
    return ids;
}

VecX Assembly::home() const
{
    return clamp(VecX::Zero(dof()));
}

VecX Assembly::clamp(const VecX& q) const
{
    return q.cwiseMax(limits_.q_lo).cwiseMin(limits_.q_hi);
}

bool Assembly::within_limits(const VecX& q, double slack) const
{
    if (q.size() != dof()) {
        return false;
    }
    return ((q - limits_.q_lo).array() >= -slack).all() && ((limits_.q_hi - q).array() >= -slack).all();
}

void Assembly::revalidate() const
{
    if (modules_.empty() || modules_.front()->kind != ModuleKind::base) {
        throw InvalidStructure("assembly must start with a base module");
    }
    if (modules_.size() < 2 || modules_.back()->kind != ModuleKind::end_effector) {
        throw InvalidStructure("assembly must end with an end effector module");
    }
    std::size_t joints = 0;
    for (std::size_t i = 0; i < modules_.size(); ++i) {
        if (i > 0 && i + 1 < modules_.size() && modules_[i]->kind != ModuleKind::regular) {
            throw InvalidStructure("interior modules must be regular");
        }
        if (i + 1 < modules_.size() && modules_[i]->distal.type != modules_[i + 1]->proximal.type) {
            throw ConnectorMismatch(i);
        }
        joints += modules_[i]->joint_count();
    }
    if (joints != chain_.joints.size() || static_cast<Eigen::Index>(joints) != limits_.q_lo.size()) {
        throw InvalidStructure("derived joint count disagrees with module joint counts");
    }
}

Assembly assemble(const ModuleLibrary& library, std::span<const int> ids)
{
    if (ids.empty()) {
        throw InvalidStructure("empty module sequence");
    }
    std::vector<ModulePtr> modules;
    modules.reserve(ids.size());
    for (int id : ids) {
        if (!library.contains(id)) {
            throw InvalidStructure("unknown module id " + std::to_string(id));
        }
        modules.push_back(library.ptr_by_id(id));
    }
    if (modules.front()->kind != ModuleKind::base) {
        throw InvalidStructure("first module must be a base");
    }
    if (modules.size() < 2 || modules.back()->kind != ModuleKind::end_effector) {
        throw InvalidStructure("last module must be an end effector");
    }
    for (std::size_t i = 1; i + 1 < modules.size(); ++i) {
        if (modules[i]->kind != ModuleKind::regular) {
            throw InvalidStructure("interior module " + std::to_string(i) + " is not a regular module");
        }
    }
    for (std::size_t i = 0; i + 1 < modules.size(); ++i) {
        if (modules[i]->distal.type != modules[i + 1]->proximal.type) {
            throw ConnectorMismatch(i);
        }
    }

    Assembly out;
    out.modules_ = modules;
    Chain& chain = out.chain_;
    std::vector<const JointSpec*> specs;
    int group = 0;
    for (std::size_t mi = 0; mi < modules.size(); ++mi) {
        const Module& m = *modules[mi];
        for (std::size_t bi = 0; bi < m.bodies.size(); ++bi) {
            Link link;
            link.body = m.bodies[bi];
            link.module_index = static_cast<int>(mi);
            if (bi == 0) {
                // The base reference frame is its proximal connector; later
                // modules mate anti-parallel to the previous distal frame.
                if (mi == 0) {
                    link.origin = m.proximal.frame.inverse();
                } else {
                    link.origin = modules[mi - 1]->distal.frame * flip_x() * m.proximal.frame.inverse();
                }
            } else {
                const JointSpec& js = m.joints[bi - 1];
                link.origin = js.parent_frame;
                link.child = js.child_frame;
                link.joint = static_cast<int>(chain.joints.size());
                ++group;
                chain.joints.push_back({js.kind, js.axis, static_cast<int>(chain.links.size())});
                specs.push_back(&js);
            }
            link.rigid_group = group;
            chain.links.push_back(std::move(link));
        }
    }
    chain.tcp = modules.back()->distal.frame;

    const auto n = static_cast<Eigen::Index>(specs.size());
    JointLimits& lim = out.limits_;
    for (VecX* v : {&lim.q_lo, &lim.q_hi, &lim.qd_lo, &lim.qd_hi, &lim.qdd_lo, &lim.qdd_hi, &lim.tau_max}) {
        v->resize(n);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const JointSpec& js = *specs[static_cast<std::size_t>(i)];
        lim.q_lo[i] = js.q_limits.lo;
        lim.q_hi[i] = js.q_limits.hi;
        lim.qd_lo[i] = js.qd_limits.lo;
        lim.qd_hi[i] = js.qd_limits.hi;
        lim.qdd_lo[i] = js.qdd_limits.lo;
        lim.qdd_hi[i] = js.qdd_limits.hi;
        lim.tau_max[i] = js.tau_max;
    }
    return out;
}

BigInt count_compositions(const ModuleLibrary& library, int max_len, bool constrained, int min_len)
{
    if (max_len < 1) {
        throw Error("max_len must be at least 1");
    }
    min_len = std::max(min_len, 1);
    BigInt total = 0;
    if (!constrained) {
        const BigInt m = library.size();
        BigInt power = 1;
        for (int n = 1; n <= max_len; ++n) {
            power *= m;
            if (n >= min_len) {
                total += power;
            }
        }
        return total;
    }

    // prefixes[t] = number of connector-valid prefixes (base, regular*) whose
    // last distal connector has type t.
    std::map<std::string, BigInt> prefixes;
    for (const auto& m : library.modules()) {
        if (m->kind == ModuleKind::base) {
            prefixes[m->distal.type] += 1;
        }
    }
    for (int len = 2; len <= max_len; ++len) {
        if (len >= min_len) {
            for (const auto& m : library.modules()) {
                if (m->kind == ModuleKind::end_effector) {
                    auto it = prefixes.find(m->proximal.type);
                    if (it != prefixes.end()) {
                        total += it->second;
                    }
                }
            }
        }
        std::map<std::string, BigInt> next;
        for (const auto& m : library.modules()) {
            if (m->kind != ModuleKind::regular) {
                continue;
            }
            auto it = prefixes.find(m->proximal.type);
            if (it != prefixes.end()) {
                next[m->distal.type] += it->second;
            }
        }
        prefixes = std::move(next);
    }
    return total;
}

std::set<int> mutation_candidates(const ModuleLibrary& library, const Chromosome& chromosome, int position)
{
    const int n = static_cast<int>(chromosome.genes.size());
    if (position < 0 || position >= n) {
        throw Error("gene position out of range");
    }
    std::set<int> out;
    const int gene = chromosome.genes[static_cast<std::size_t>(position)];
    const bool interior = position > 0 && position < n - 1;

    auto neighbor = [&](int step) -> const Module* {
        for (int i = position + step; i >= 0 && i < n; i += step) {
            const int g = chromosome.genes[static_cast<std::size_t>(i)];
            if (g != 0) {
                return &library.by_gene(g);
            }
        }
        return nullptr;
    };

    if (gene != 0) {
        const Module& current = library.by_gene(gene);
        for (const auto& m : library.modules()) {
            if (m->kind == current.kind && m->proximal.type == current.proximal.type &&
                m->distal.type == current.distal.type) {
                out.insert(library.gene_of(m->id));
            }
        }
    }
    if (!interior) {
        return out;
    }
    const Module* left = neighbor(-1);
    const Module* right = neighbor(+1);
    if (left == nullptr || right == nullptr) {
        return out;
    }
    if (can_connect(*left, *right)) {
        out.insert(0);
    }
    if (gene == 0) {
        for (const auto& m : library.modules()) {
            if (m->kind == ModuleKind::regular && can_connect(*left, *m) && can_connect(*m, *right)) {
                out.insert(library.gene_of(m->id));
            }
        }
    }
    return out;
}

}  // namespace modsynth
