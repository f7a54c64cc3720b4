#include "modsynth/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "modsynth/errors.hpp"

namespace modsynth {

namespace {

json vec_to_json(const VecX& v)
{
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        j.push_back(v[i]);
    }
    return j;
}

VecX vec_from_json(const json& j)
{
    VecX v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
    }
    return v;
}

Vec3 vec3_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 3) {
        throw ParseError("expected an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Mat3 inertia_from_json(const json& j)
{
    if (j.is_array() && j.size() == 3 && j[0].is_number()) {
        return vec3_from_json(j).asDiagonal();
    }
    if (!j.is_array() || j.size() != 3) {
        throw ParseError("inertia must be a 3x3 matrix or a diagonal of 3 numbers");
    }
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        const Vec3 row = vec3_from_json(j[static_cast<std::size_t>(r)]);
        m.row(r) = row.transpose();
    }
    return m;
}

json mat3_to_json(const Mat3& m)
{
    json j = json::array();
    for (int r = 0; r < 3; ++r) {
        j.push_back(vec3_to_json(m.row(r).transpose()));
    }
    return j;
}

json interval_to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

Interval interval_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2) {
        throw ParseError("interval must be [lo, hi]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

ModuleKind kind_from_string(const std::string& s)
{
    if (s == "base") {
        return ModuleKind::base;
    }
    if (s == "regular") {
        return ModuleKind::regular;
    }
    if (s == "end_effector") {
        return ModuleKind::end_effector;
    }
    throw ParseError("unknown module kind '" + s + "'");
}

Connector connector_from_json(const json& j, Gender gender)
{
    Connector c;
    c.type = j.at("type").get<std::string>();
    c.gender = gender;
    if (j.contains("frame")) {
        c.frame = transform_from_json(j["frame"]);
    }
    return c;
}

json connector_to_json(const Connector& c) { return {{"type", c.type}, {"frame", transform_to_json(c.frame)}}; }

Tolerances tolerances_from_json(const json& j)
{
    if (j.is_string()) {
        const auto preset = parse_tolerance_preset(j.get<std::string>());
        if (!preset) {
            throw ParseError("unknown tolerance preset '" + j.get<std::string>() + "'");
        }
        return tolerance_preset(*preset);
    }
    Tolerances t;
    if (j.contains("preset")) {
        t = tolerances_from_json(j["preset"]);
    }
    if (j.contains("t_p")) {
        t.t_p = j["t_p"].get<double>();
    }
    if (j.contains("t_axis")) {
        t.t_axis = vec3_from_json(j["t_axis"]);
    }
    if (j.contains("phi")) {
        t.phi = j["phi"].get<double>();
    }
    t.validate();
    return t;
}

json tolerances_to_json(const Tolerances& t)
{
    return {{"t_p", t.t_p}, {"t_axis", vec3_to_json(t.t_axis)}, {"phi", t.phi}};
}

std::string format_double(double v)
{
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json extended_real(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

}  // namespace

json transform_to_json(const Transform& t)
{
    json rows = json::array();
    const Eigen::Matrix4d m = t.matrix();
    for (int r = 0; r < 4; ++r) {
        rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
    }
    return rows;
}

Transform transform_from_json(const json& j)
{
    Eigen::Matrix4d m;
    if (j.is_array() && j.size() == 4) {
        for (int r = 0; r < 4; ++r) {
            const json& row = j[static_cast<std::size_t>(r)];
            if (!row.is_array() || row.size() != 4) {
                throw ParseError("transform rows must have 4 entries");
            }
            for (int c = 0; c < 4; ++c) {
                m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
            }
        }
    } else if (j.is_array() && j.size() == 16) {
        for (int k = 0; k < 16; ++k) {
            m(k / 4, k % 4) = j[static_cast<std::size_t>(k)].get<double>();
        }
    } else if (j.is_object()) {
        // {"position": [x, y, z], "orientation": [w, x, y, z]}
        Transform t = Transform::Identity();
        if (j.contains("position")) {
            t.translation() = vec3_from_json(j["position"]);
        }
        if (j.contains("orientation")) {
            const auto& q = j["orientation"];
            if (!q.is_array() || q.size() != 4) {
                throw ParseError("orientation must be a quaternion [w, x, y, z]");
            }
            Quat quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
            t.linear() = quat.normalized().toRotationMatrix();
        }
        return t;
    } else {
        throw ParseError("transform must be a 4x4 matrix");
    }
    const Mat3 r = m.topLeftCorner<3, 3>();
    if ((r * r.transpose() - Mat3::Identity()).norm() > 1e-6 || (m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).norm() > 1e-12) {
        throw ParseError("transform is not a rigid motion");
    }
    Transform t = Transform::Identity();
    t.matrix() = m;
    return t;
}

json primitive_to_json(const Primitive& p)
{
    json j;
    switch (p.kind) {
    case PrimitiveKind::sphere:
        j = {{"kind", "sphere"}, {"dims", json::array({p.dims.x()})}};
        break;
    case PrimitiveKind::box:
        j = {{"kind", "box"}, {"dims", vec3_to_json(p.dims)}};
        break;
    case PrimitiveKind::cylinder:
        j = {{"kind", "cylinder"}, {"dims", json::array({p.dims.x(), p.dims.y()})}};
        break;
    case PrimitiveKind::capsule:
        j = {{"kind", "capsule"}, {"dims", json::array({p.dims.x(), p.dims.y()})}};
        break;
    }
    j["pose"] = transform_to_json(p.pose);
    return j;
}

Primitive primitive_from_json(const json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    const Transform pose = j.contains("pose") ? transform_from_json(j["pose"]) : Transform::Identity();
    std::vector<double> dims;
    if (j.contains("dims")) {
        dims = j["dims"].get<std::vector<double>>();
    } else if (j.contains("half_extents")) {
        dims = j["half_extents"].get<std::vector<double>>();
    } else {
        dims.push_back(j.at("radius").get<double>());
        if (j.contains("half_length")) {
            dims.push_back(j["half_length"].get<double>());
        }
    }
    auto need = [&](std::size_t n) {
        if (dims.size() != n) {
            throw ParseError(kind + " needs " + std::to_string(n) + " dims");
        }
    };
    Primitive p;
    if (kind == "sphere") {
        need(1);
        p = Primitive::sphere(dims[0], pose);
    } else if (kind == "box") {
        need(3);
        p = Primitive::box(Vec3(dims[0], dims[1], dims[2]), pose);
    } else if (kind == "cylinder") {
        need(2);
        p = Primitive::cylinder(dims[0], dims[1], pose);
    } else if (kind == "capsule") {
        need(2);
        p = Primitive::capsule(dims[0], dims[1], pose);
    } else {
        throw ParseError("unknown primitive kind '" + kind + "'");
    }
    p.validate();
    return p;
}

json library_to_json(const ModuleLibrary& library)
{
    json types = json::array();
    for (const auto& t : library.connector_types()) {
        types.push_back({{"id", t.id}, {"size_class", t.size_class}});
    }
    json modules = json::array();
    for (const auto& mp : library.modules()) {
        const Module& m = *mp;
        json bodies = json::array();
        for (const auto& b : m.bodies) {
            json geometry = json::array();
            for (const auto& g : b.geometry) {
                geometry.push_back(primitive_to_json(g));
            }
            bodies.push_back({{"mass", b.mass},
                              {"com", vec3_to_json(b.com)},
                              {"inertia", mat3_to_json(b.inertia)},
                              {"geometry", geometry}});
        }
        json joints = json::array();
        for (const auto& js : m.joints) {
            joints.push_back({{"kind", to_string(js.kind)},
                              {"axis", vec3_to_json(js.axis)},
                              {"parent_frame", transform_to_json(js.parent_frame)},
                              {"child_frame", transform_to_json(js.child_frame)},
                              {"q_limits", interval_to_json(js.q_limits)},
                              {"qd_limits", interval_to_json(js.qd_limits)},
                              {"qdd_limits", interval_to_json(js.qdd_limits)},
                              {"tau_max", js.tau_max}});
        }
        modules.push_back({{"id", m.id},
                           {"name", m.name},
                           {"kind", to_string(m.kind)},
                           {"bodies", bodies},
                           {"joints", joints},
                           {"proximal", connector_to_json(m.proximal)},
                           {"distal", connector_to_json(m.distal)}});
    }
    return {{"connector_types", types}, {"modules", modules}};
}

ModuleLibrary library_from_json(const json& j)
{
    try {
        std::vector<ConnectorType> types;
        if (j.contains("connector_types")) {
            for (const auto& t : j["connector_types"]) {
                if (t.is_string()) {
                    types.push_back({t.get<std::string>(), ""});
                } else {
                    types.push_back({t.at("id").get<std::string>(), t.value("size_class", std::string())});
                }
            }
        }
        std::vector<Module> modules;
        for (const auto& jm : j.at("modules")) {
            Module m;
            m.id = jm.at("id").get<int>();
            m.name = jm.value("name", std::string());
            m.kind = kind_from_string(jm.at("kind").get<std::string>());
            for (const auto& jb : jm.at("bodies")) {
                Body b;
                b.mass = jb.value("mass", 0.0);
                if (jb.contains("com")) {
                    b.com = vec3_from_json(jb["com"]);
                }
                if (jb.contains("inertia")) {
                    b.inertia = inertia_from_json(jb["inertia"]);
                }
                for (const auto& g : jb.value("geometry", json::array())) {
                    b.geometry.push_back(primitive_from_json(g));
                }
                m.bodies.push_back(std::move(b));
            }
            for (const auto& jj : jm.value("joints", json::array())) {
                JointSpec js;
                const auto kind = jj.value("kind", std::string("revolute"));
                if (kind == "revolute") {
                    js.kind = JointKind::revolute;
                } else if (kind == "prismatic") {
                    js.kind = JointKind::prismatic;
                } else {
                    throw ParseError("unknown joint kind '" + kind + "'");
                }
                js.axis = vec3_from_json(jj.at("axis"));
                if (jj.contains("parent_frame")) {
                    js.parent_frame = transform_from_json(jj["parent_frame"]);
                }
                if (jj.contains("child_frame")) {
                    js.child_frame = transform_from_json(jj["child_frame"]);
                }
                js.q_limits = interval_from_json(jj.at("q_limits"));
                js.qd_limits = interval_from_json(jj.at("qd_limits"));
                js.qdd_limits = interval_from_json(jj.at("qdd_limits"));
                js.tau_max = jj.at("tau_max").get<double>();
                m.joints.push_back(js);
            }
            m.proximal = connector_from_json(jm.at("proximal"), Gender::proximal);
            m.distal = connector_from_json(jm.at("distal"), Gender::distal);
            modules.push_back(std::move(m));
        }
        return ModuleLibrary(std::move(modules), std::move(types));
    } catch (const json::exception& e) {
        throw ParseError(std::string("module library: ") + e.what());
    }
}

json task_to_json(const Task& task)
{
    json goals = json::array();
    for (const auto& g : task.goals) {
        json jg = {{"id", g.id}, {"pose", transform_to_json(g.pose.to_transform())}};
        if (g.tolerances) {
            jg["tolerances"] = tolerances_to_json(*g.tolerances);
        }
        goals.push_back(jg);
    }
    json obstacles = json::array();
    for (const auto& o : task.scene.obstacles) {
        obstacles.push_back(primitive_to_json(o));
    }
    return {{"name", task.name},
            {"base_pose", transform_to_json(task.base_pose)},
            {"tolerances", tolerances_to_json(task.tol)},
            {"goals", goals},
            {"obstacles", obstacles}};
}

Task task_from_json(const json& j)
{
    try {
        Task task;
        task.name = j.value("name", std::string());
        if (j.contains("base_pose")) {
            task.base_pose = transform_from_json(j["base_pose"]);
        }
        for (const char* key : {"tolerances", "tolerance"}) {
            if (j.contains(key)) {
                task.tol = tolerances_from_json(j[key]);
            }
        }
        for (const auto& jg : j.at("goals")) {
            Goal g;
            g.id = jg.value("id", "g" + std::to_string(task.goals.size() + 1));
            if (jg.contains("pose")) {
                g.pose = Pose::from_transform(transform_from_json(jg["pose"]));
            } else {
                // Shorthand: "position" [x, y, z] and "orientation" [w, x, y, z].
                g.pose.p = vec3_from_json(jg.at("position"));
                if (jg.contains("orientation")) {
                    const auto& q = jg["orientation"];
                    if (!q.is_array() || q.size() != 4) {
                        throw ParseError("goal orientation must be a quaternion [w, x, y, z]");
                    }
                    g.pose.n = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
                    if (g.pose.n.norm() < 1e-12) {
                        throw ParseError("goal orientation must be a non-zero quaternion");
                    }
                    g.pose.n.normalize();
                }
            }
            for (const char* key : {"tolerances", "tolerance"}) {
                if (jg.contains(key)) {
                    g.tolerances = tolerances_from_json(jg[key]);
                }
            }
            task.goals.push_back(std::move(g));
        }
        for (const auto& o : j.value("obstacles", json::array())) {
            task.scene.obstacles.push_back(primitive_from_json(o));
        }
        return task;
    } catch (const json::exception& e) {
        throw ParseError(std::string("task: ") + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("task: ") + e.what());
    }
}

json trajectory_to_json(const Trajectory& trajectory)
{
    json q = json::array(), qd = json::array(), qdd = json::array();
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        q.push_back(vec_to_json(trajectory.q[k]));
        qd.push_back(vec_to_json(trajectory.qd[k]));
        qdd.push_back(vec_to_json(trajectory.qdd[k]));
    }
    return {{"t_max", trajectory.t_max()},
            {"goal_times", trajectory.goal_times},
            {"t", trajectory.t},
            {"q", q},
            {"qd", qd},
            {"qdd", qdd}};
}

Trajectory trajectory_from_json(const json& j)
{
    try {
        Trajectory t;
        t.t = j.at("t").get<std::vector<double>>();
        t.goal_times = j.value("goal_times", std::vector<double>{});
        for (const char* key : {"q", "qd", "qdd"}) {
            auto& dst = std::string(key) == "q" ? t.q : std::string(key) == "qd" ? t.qd : t.qdd;
            for (const auto& row : j.at(key)) {
                dst.push_back(vec_from_json(row));
            }
            if (dst.size() != t.t.size()) {
                throw ParseError(std::string("trajectory: '") + key + "' length differs from 't'");
            }
        }
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("trajectory: ") + e.what());
    }
}

json fitness_to_json(const FitnessVector& f)
{
    json j = {{"f1", f.f1}, {"depth", f.depth}};
    j["f2"] = f.f2 ? json(*f.f2) : json(nullptr);
    j["f3"] = f.f3 ? json(*f.f3) : json(nullptr);
    j["f4"] = f.f4 ? extended_real(*f.f4) : json(nullptr);
    return j;
}

json history_to_json(const RunHistory& history)
{
    json out = json::array();
    for (const auto& g : history.generations) {
        out.push_back({{"generation", g.generation},
                       {"best", fitness_to_json(g.best)},
                       {"best_ids", g.best_ids},
                       {"best_cost", g.best_cost ? json(*g.best_cost) : json(nullptr)},
                       {"depth_histogram", g.depth_histogram},
                       {"feasible", g.feasible},
                       {"wall_ms", g.wall_ms}});
    }
    return out;
}

std::string history_to_csv(const RunHistory& history)
{
    std::ostringstream out;
    out << "generation,best_f1,best_f2,best_f3,best_f4,depth_histogram,wall_ms\n";
    for (const auto& g : history.generations) {
        out << g.generation << ',' << g.best.f1 << ',';
        if (g.best.f2) {
            out << *g.best.f2;
        }
        out << ',';
        if (g.best.f3) {
            out << *g.best.f3;
        }
        out << ',';
        if (g.best.f4) {
            out << format_double(*g.best.f4);
        }
        out << ',' << g.depth_histogram[0] << ';' << g.depth_histogram[1] << ';' << g.depth_histogram[2] << ';'
            << g.depth_histogram[3] << ',' << format_double(g.wall_ms) << '\n';
    }
    return out.str();
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string() + ": cannot open file");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(path.string() + ": cannot write file");
    }
    out << text;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

ModuleLibrary load_library(const std::filesystem::path& path)
{
    const json j = read_json(path);
    try {
        return library_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Task load_task(const std::filesystem::path& path)
{
    const json j = read_json(path);
    try {
        return task_from_json(j);
    } catch (const Error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace modsynth
