#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "modsynth/geometry.hpp"
#include "modsynth/types.hpp"

namespace modsynth {

struct ConnectorType {
    std::string id;
    std::string size_class;

    friend bool operator==(const ConnectorType& a, const ConnectorType& b) { return a.id == b.id; }
};

enum class Gender { proximal, distal };

struct Connector {
    std::string type;  // ConnectorType id
    Gender gender = Gender::proximal;
    Transform frame = Transform::Identity();  // relative to the owning body
};

struct Body {
    double mass = 0.0;
    Vec3 com = Vec3::Zero();
    Mat3 inertia = Mat3::Zero();  // about com, body frame
    std::vector<Primitive> geometry;

    bool empty() const { return mass == 0.0 && geometry.empty(); }
};

enum class JointKind { revolute, prismatic };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Joint k of a module connects body k (parent) to body k + 1 (child):
/// T_child = T_parent * parent_frame * motion(q) * child_frame, with the
/// motion about or along `axis` expressed in the joint frame.
struct JointSpec {
    JointKind kind = JointKind::revolute;
    Vec3 axis = Vec3::UnitZ();
    Transform parent_frame = Transform::Identity();
    Transform child_frame = Transform::Identity();
    Interval q_limits{-M_PI, M_PI};
    Interval qd_limits{-1.0, 1.0};
    Interval qdd_limits{-1.0, 1.0};
    double tau_max = 1.0;
};

enum class ModuleKind { base, regular, end_effector };

/// The proximal connector sits on the first body, the distal connector on the last.
struct Module {
    int id = 0;
    std::string name;
    ModuleKind kind = ModuleKind::regular;
    std::vector<Body> bodies;
    std::vector<JointSpec> joints;
    Connector proximal{.type = {}, .gender = Gender::proximal, .frame = Transform::Identity()};
    Connector distal{.type = {}, .gender = Gender::distal, .frame = Transform::Identity()};

    std::size_t joint_count() const { return joints.size(); }
    bool has_joint() const { return !joints.empty(); }
    void validate() const;
};

using ModulePtr = std::shared_ptr<const Module>;

const char* to_string(ModuleKind kind);
const char* to_string(JointKind kind);

/// Immutable set of modules. Gene values 1..size() index modules in
/// ascending id order; gene 0 is the empty slot.
class ModuleLibrary {
public:
    ModuleLibrary() = default;
    ModuleLibrary(std::vector<Module> modules, std::vector<ConnectorType> connector_types = {});

    std::size_t size() const { return modules_.size(); }
    const std::vector<ModulePtr>& modules() const { return modules_; }
    const std::vector<ConnectorType>& connector_types() const { return connector_types_; }

    const Module& by_id(int id) const;
    ModulePtr ptr_by_id(int id) const;
    bool contains(int id) const { return gene_by_id_.count(id) != 0; }

    int gene_of(int id) const;
    int id_of_gene(int gene) const;
    const Module& by_gene(int gene) const { return by_id(id_of_gene(gene)); }

    std::vector<int> ids_of_kind(ModuleKind kind) const;

private:
    std::vector<ModulePtr> modules_;
    std::vector<ConnectorType> connector_types_;
    std::map<int, int> gene_by_id_;
};

bool can_connect(const Module& a, const Module& b);

/// True if ids form a base - regular* - end effector sequence with matching
/// connectors at every junction. Cheaper than assemble().
bool is_valid_sequence(const ModuleLibrary& library, std::span<const int> ids);

struct Link {
    Body body;
    Transform origin = Transform::Identity();  // previous link frame -> joint frame
    Transform child = Transform::Identity();   // moved joint frame -> link frame
    int joint = -1;                            // index into Chain::joints, -1 if rigid
    int module_index = 0;
    int rigid_group = 0;
};

struct ChainJoint {
    JointKind kind = JointKind::revolute;
    Vec3 axis = Vec3::UnitZ();
    int link = 0;
};

/// Flattened base-to-TCP chain. The first link is placed relative to the
/// base reference frame; tcp maps the last link frame onto the TCP.
struct Chain {
    std::vector<Link> links;
    std::vector<ChainJoint> joints;
    Transform tcp = Transform::Identity();
};

struct JointLimits {
    VecX q_lo, q_hi;
    VecX qd_lo, qd_hi;
    VecX qdd_lo, qdd_hi;
    VecX tau_max;
};

class Assembly {
public:
    const std::vector<ModulePtr>& modules() const { return modules_; }
    std::vector<int> module_ids() const;
    const Chain& chain() const { return chain_; }
    const JointLimits& limits() const { return limits_; }
    int dof() const { return static_cast<int>(chain_.joints.size()); }
    int module_count() const { return static_cast<int>(modules_.size()); }

    /// Home configuration q = 0, clamped into the joint limits.
    VecX home() const;
    VecX clamp(const VecX& q) const;
    bool within_limits(const VecX& q, double slack = 0.0) const;

    /// Re-checks every structural invariant; throws on violation.
    void revalidate() const;

private:
    friend Assembly assemble(const ModuleLibrary& library, std::span<const int> ids);

    std::vector<ModulePtr> modules_;
    Chain chain_;
    JointLimits limits_;
};

/// Throws InvalidStructure or ConnectorMismatch.
Assembly assemble(const ModuleLibrary& library, std::span<const int> ids);
inline Assembly assemble(const ModuleLibrary& library, std::initializer_list<int> ids)
{
    std::vector<int> v(ids);
    return assemble(library, std::span<const int>(v));
}

using BigInt = boost::multiprecision::cpp_int;

/// Counts module sequences with min_len <= length <= max_len. Unconstrained:
/// sum |M|^n. Constrained: only connector-valid base..end-effector assemblies.
BigInt count_compositions(const ModuleLibrary& library, int max_len, bool constrained, int min_len = 1);

struct Chromosome {
    std::vector<int> genes;

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Gene values that may replace the gene at `position`.
std::set<int> mutation_candidates(const ModuleLibrary& library, const Chromosome& chromosome, int position);

}  // namespace modsynth
