#include "chargeplan/core/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace chargeplan {

using nlohmann::json;

namespace {

class Check {
public:
    explicit Check(std::vector<Violation>& out) : out_(out) {}

    void add(const std::string& path, const std::string& message) {
        out_.push_back({path, message});
    }

    bool number(const json& j, const std::string& key, const std::string& path, double& out) {
        if (!j.contains(key) || !j[key].is_number()) {
            add(path + "." + key, "missing or non-numeric field");
            return false;
        }
        out = j[key].get<double>();
        return true;
    }

    bool integer(const json& j, const std::string& key, const std::string& path, int& out) {
        if (!j.contains(key) || !j[key].is_number_integer()) {
            add(path + "." + key, "missing or non-integer field");
            return false;
        }
        out = j[key].get<int>();
        return true;
    }

    bool text(const json& j, const std::string& key, const std::string& path, std::string& out) {
        if (!j.contains(key) || !j[key].is_string()) {
            add(path + "." + key, "missing or non-string field");
            return false;
        }
        out = j[key].get<std::string>();
        return true;
    }

private:
    std::vector<Violation>& out_;
};

std::string idx(const std::string& base, const std::string& field, size_t i) {
    return base + "." + field + "[" + std::to_string(i) + "]";
}

}  // namespace

InvalidInstanceError::InvalidInstanceError(std::vector<Violation> v)
    : std::runtime_error([&v] {
          std::ostringstream os;
          os << "invalid instance (" << v.size() << " violation" << (v.size() == 1 ? "" : "s") << ")";
          for (const auto& x : v) os << "\n  " << x.path << ": " << x.message;
          return os.str();
      }()),
      violations_(std::move(v)) {}

ParseResult parse_instance(const json& doc) {
    ParseResult result;
    Check check(result.violations);
    Instance inst;

    if (!doc.is_object()) {
        check.add("$", "document is not a JSON object");
        return result;
    }
    if (doc.value("format", "") != "chargeplan-instance")
        check.add("$.format", "expected \"chargeplan-instance\"");

    if (doc.contains("horizon") && doc["horizon"].is_object()) {
        const json& h = doc["horizon"];
        check.integer(h, "periods", "$.horizon", inst.horizon.periods);
        check.integer(h, "period_minutes", "$.horizon", inst.horizon.period_minutes);
        if (inst.horizon.periods < 1) check.add("$.horizon.periods", "must be positive");
        if (inst.horizon.period_minutes < 1) check.add("$.horizon.period_minutes", "must be positive");
    } else {
        check.add("$.horizon", "missing horizon object");
    }

    if (doc.contains("tech") && doc["tech"].is_object()) {
        const json& t = doc["tech"];
        TechParams& p = inst.tech;
        check.number(t, "q_max_kwh", "$.tech", p.q_max_kwh);
        check.number(t, "q_min_kwh", "$.tech", p.q_min_kwh);
        check.number(t, "charge_power_kw", "$.tech", p.charge_power_kw);
        check.number(t, "consumption_kwh_per_km", "$.tech", p.consumption_kwh_per_km);
        check.number(t, "cc_cv_knee", "$.tech", p.cc_cv_knee);
        check.number(t, "depot_charge_fraction", "$.tech", p.depot_charge_fraction);
        if (!(p.q_min_kwh >= 0.0 && p.q_min_kwh < p.q_max_kwh))
            check.add("$.tech", "requires 0 <= q_min < q_max");
        if (!(p.charge_power_kw > 0.0)) check.add("$.tech.charge_power_kw", "must be positive");
        if (!(p.cc_cv_knee > 0.0 && p.cc_cv_knee <= 1.0))
            check.add("$.tech.cc_cv_knee", "must be in (0, 1]");
        if (!(p.depot_charge_fraction >= 0.0 && p.depot_charge_fraction <= 1.0))
            check.add("$.tech.depot_charge_fraction", "must be in [0, 1]");
        if (!(p.consumption_kwh_per_km >= 0.0))
            check.add("$.tech.consumption_kwh_per_km", "must be non-negative");
    } else {
        check.add("$.tech", "missing tech object");
    }

    const int total_minutes = inst.horizon.periods * inst.horizon.period_minutes;

    std::set<std::string> station_ids;
    if (doc.contains("stations") && doc["stations"].is_array()) {
        for (size_t i = 0; i < doc["stations"].size(); ++i) {
            const json& js = doc["stations"][i];
            const std::string path = idx("$", "stations", i);
            Station s;
            check.text(js, "id", path, s.id);
            check.number(js, "x_km", path, s.location.x_km);
            check.number(js, "y_km", path, s.location.y_km);
            check.number(js, "cost", path, s.cost);
            check.integer(js, "charge_points", path, s.charge_points);
            if (!s.id.empty() && !station_ids.insert(s.id).second)
                check.add(path + ".id", "duplicate station identifier '" + s.id + "'");
            if (!(s.cost > 0.0)) check.add(path + ".cost", "must be positive");
            if (s.charge_points < 1) check.add(path + ".charge_points", "must be at least 1");
            inst.stations.push_back(std::move(s));
        }
    } else {
        check.add("$.stations", "missing stations array");
    }
    inst.rebuild_station_index();

    if (doc.contains("scenarios") && doc["scenarios"].is_array()) {
        for (size_t zi = 0; zi < doc["scenarios"].size(); ++zi) {
            const json& jz = doc["scenarios"][zi];
            const std::string zpath = idx("$", "scenarios", zi);
            Scenario z;
            check.text(jz, "id", zpath, z.id);
            check.number(jz, "weight", zpath, z.weight);
            if (!(z.weight > 0.0)) check.add(zpath + ".weight", "must be positive");

            std::set<std::string> vehicle_ids;
            if (!jz.contains("vehicles") || !jz["vehicles"].is_array() || jz["vehicles"].empty()) {
                check.add(zpath + ".vehicles", "scenario must contain at least one vehicle");
            } else {
                for (size_t vi = 0; vi < jz["vehicles"].size(); ++vi) {
                    const json& jv = jz["vehicles"][vi];
                    const std::string vpath = idx(zpath, "vehicles", vi);
                    Vehicle v;
                    check.text(jv, "id", vpath, v.id);
                    check.number(jv, "q_begin_kwh", vpath, v.q_begin_kwh);
                    check.number(jv, "q_end_kwh", vpath, v.q_end_kwh);
                    if (!v.id.empty() && !vehicle_ids.insert(v.id).second)
                        check.add(vpath + ".id", "duplicate vehicle identifier '" + v.id + "'");
                    if (!(v.q_begin_kwh >= 0.0 && v.q_begin_kwh <= inst.tech.q_max_kwh))
                        check.add(vpath + ".q_begin_kwh", "initial SOC exceeds capacity or is negative");
                    if (!(v.q_end_kwh >= 0.0 && v.q_end_kwh <= inst.tech.q_max_kwh))
                        check.add(vpath + ".q_end_kwh", "required end SOC exceeds capacity or is negative");

                    if (!jv.contains("trips") || !jv["trips"].is_array() || jv["trips"].empty()) {
                        check.add(vpath + ".trips", "vehicle must contain at least one trip");
                    } else {
                        for (size_t ti = 0; ti < jv["trips"].size(); ++ti) {
                            const json& jt = jv["trips"][ti];
                            const std::string tpath = idx(vpath, "trips", ti);
                            Trip t;
                            check.number(jt, "pickup_x_km", tpath, t.pickup.x_km);
                            check.number(jt, "pickup_y_km", tpath, t.pickup.y_km);
                            check.number(jt, "dropoff_x_km", tpath, t.dropoff.x_km);
                            check.number(jt, "dropoff_y_km", tpath, t.dropoff.y_km);
                            check.integer(jt, "start_minute", tpath, t.start_minute);
                            check.integer(jt, "end_minute", tpath, t.end_minute);
                            check.number(jt, "distance_km", tpath, t.distance_km);
                            check.number(jt, "energy_kwh", tpath, t.energy_kwh);
                            if (t.start_minute >= t.end_minute)
                                check.add(tpath, "trip times reversed");
                            if (t.start_minute < 0 || t.end_minute > total_minutes)
                                check.add(tpath, "trip outside planning horizon");
                            if (t.energy_kwh < 0.0) check.add(tpath + ".energy_kwh", "must be non-negative");
                            if (t.distance_km < 0.0) check.add(tpath + ".distance_km", "must be non-negative");
                            if (ti > 0 && !v.trips.empty() &&
                                v.trips.back().end_minute > t.start_minute)
                                check.add(tpath, "trips overlap with preceding trip");
                            v.trips.push_back(t);
                        }
                    }

                    const size_t expected_gaps = v.trips.empty() ? 0 : v.trips.size() - 1;
                    if (!jv.contains("gaps") || !jv["gaps"].is_array() ||
                        jv["gaps"].size() != expected_gaps) {
                        check.add(vpath + ".gaps", "expected exactly one gap per consecutive trip pair");
                    } else {
                        for (size_t gi = 0; gi < jv["gaps"].size(); ++gi) {
                            const json& jg = jv["gaps"][gi];
                            const std::string gpath = idx(vpath, "gaps", gi);
                            IdleGap g;
                            check.integer(jg, "after_trip", gpath, g.after_trip);
                            check.integer(jg, "direct_minutes", gpath, g.direct_minutes);
                            check.number(jg, "direct_distance_km", gpath, g.direct_distance_km);
                            check.number(jg, "direct_energy_kwh", gpath, g.direct_energy_kwh);
                            if (g.after_trip != (int)gi)
                                check.add(gpath + ".after_trip", "gaps must follow trip order");
                            if (g.direct_minutes < 0 || g.direct_minutes > total_minutes)
                                check.add(gpath + ".direct_minutes", "outside [0, horizon]");
                            if (g.direct_energy_kwh < 0.0)
                                check.add(gpath + ".direct_energy_kwh", "must be non-negative");
                            if (jg.contains("stations") && jg["stations"].is_array()) {
                                for (size_t si = 0; si < jg["stations"].size(); ++si) {
                                    const json& ja = jg["stations"][si];
                                    const std::string apath = idx(gpath, "stations", si);
                                    GapStationAccess a;
                                    std::string sid;
                                    check.text(ja, "station", apath, sid);
                                    a.station = inst.find_station(sid);
                                    if (a.station < 0)
                                        check.add(apath + ".station",
                                                  "unresolved station reference '" + sid + "'");
                                    check.integer(ja, "travel_in_minutes", apath, a.travel_in_minutes);
                                    check.integer(ja, "travel_out_minutes", apath, a.travel_out_minutes);
                                    check.number(ja, "distance_in_km", apath, a.distance_in_km);
                                    check.number(ja, "distance_out_km", apath, a.distance_out_km);
                                    check.number(ja, "energy_in_kwh", apath, a.energy_in_kwh);
                                    check.number(ja, "energy_out_kwh", apath, a.energy_out_kwh);
                                    if (a.travel_in_minutes < 0 || a.travel_in_minutes > total_minutes ||
                                        a.travel_out_minutes < 0 || a.travel_out_minutes > total_minutes)
                                        check.add(apath, "travel time outside [0, horizon]");
                                    if (a.energy_in_kwh < 0.0 || a.energy_out_kwh < 0.0)
                                        check.add(apath, "negative detour energy");
                                    g.stations.push_back(a);
                                }
                            } else {
                                check.add(gpath + ".stations", "missing stations array");
                            }
                            v.gaps.push_back(std::move(g));
                        }
                    }
                    z.vehicles.push_back(std::move(v));
                }
            }
            inst.scenarios.push_back(std::move(z));
        }
    } else {
        check.add("$.scenarios", "missing scenarios array");
    }

    if (result.violations.empty()) result.instance = std::move(inst);
    return result;
}

json instance_to_json(const Instance& inst) {
    json doc;
    doc["format"] = "chargeplan-instance";
    doc["version"] = 1;
    doc["horizon"] = {{"periods", inst.horizon.periods},
                      {"period_minutes", inst.horizon.period_minutes}};
    doc["tech"] = {{"q_max_kwh", inst.tech.q_max_kwh},
                   {"q_min_kwh", inst.tech.q_min_kwh},
                   {"charge_power_kw", inst.tech.charge_power_kw},
                   {"consumption_kwh_per_km", inst.tech.consumption_kwh_per_km},
                   {"cc_cv_knee", inst.tech.cc_cv_knee},
                   {"depot_charge_fraction", inst.tech.depot_charge_fraction}};
    doc["stations"] = json::array();
    for (const auto& s : inst.stations) {
        doc["stations"].push_back({{"id", s.id},
                                   {"x_km", s.location.x_km},
                                   {"y_km", s.location.y_km},
                                   {"cost", s.cost},
                                   {"charge_points", s.charge_points}});
    }
    doc["scenarios"] = json::array();
    for (const auto& z : inst.scenarios) {
        json jz = {{"id", z.id}, {"weight", z.weight}, {"vehicles", json::array()}};
        for (const auto& v : z.vehicles) {
            json jv = {{"id", v.id},
                       {"q_begin_kwh", v.q_begin_kwh},
                       {"q_end_kwh", v.q_end_kwh},
                       {"trips", json::array()},
                       {"gaps", json::array()}};
            for (const auto& t : v.trips) {
                jv["trips"].push_back({{"pickup_x_km", t.pickup.x_km},
                                       {"pickup_y_km", t.pickup.y_km},
                                       {"dropoff_x_km", t.dropoff.x_km},
                                       {"dropoff_y_km", t.dropoff.y_km},
                                       {"start_minute", t.start_minute},
                                       {"end_minute", t.end_minute},
                                       {"distance_km", t.distance_km},
                                       {"energy_kwh", t.energy_kwh}});
            }
            for (const auto& g : v.gaps) {
                json jg = {{"after_trip", g.after_trip},
                           {"direct_minutes", g.direct_minutes},
                           {"direct_distance_km", g.direct_distance_km},
                           {"direct_energy_kwh", g.direct_energy_kwh},
                           {"stations", json::array()}};
                for (const auto& a : g.stations) {
                    jg["stations"].push_back({{"station", inst.stations[a.station].id},
                                              {"travel_in_minutes", a.travel_in_minutes},
                                              {"travel_out_minutes", a.travel_out_minutes},
                                              {"distance_in_km", a.distance_in_km},
                                              {"distance_out_km", a.distance_out_km},
                                              {"energy_in_kwh", a.energy_in_kwh},
                                              {"energy_out_kwh", a.energy_out_kwh}});
                }
                jv["gaps"].push_back(std::move(jg));
            }
            jz["vehicles"].push_back(std::move(jv));
        }
        doc["scenarios"].push_back(std::move(jz));
    }
    return doc;
}

Instance load_instance(const std::string& path) {
    json doc = json::parse(read_text_file(path));
    ParseResult r = parse_instance(doc);
    if (!r.ok()) throw InvalidInstanceError(std::move(r.violations));
    return std::move(*r.instance);
}

void save_instance(const Instance& inst, const std::string& path) {
    write_text_file(path, instance_to_json(inst).dump(2) + "\n");
}

json configuration_to_json(const StationConfiguration& config, const Instance& inst) {
    json doc;
    doc["format"] = "chargeplan-solution";
    doc["version"] = 1;
    json open = json::array();
    for (int s : config.open_indices()) open.push_back(inst.stations[s].id);
    doc["opened"] = std::move(open);
    doc["total_cost"] = config.total_cost;
    return doc;
}

StationConfiguration configuration_from_json(const json& doc, const Instance& inst) {
    if (doc.value("format", "") != "chargeplan-solution")
        throw std::runtime_error("not a chargeplan-solution document");
    std::vector<int> open;
    for (const auto& jid : doc.at("opened")) {
        int s = inst.find_station(jid.get<std::string>());
        if (s < 0)
            throw std::runtime_error("solution references unknown station '" +
                                     jid.get<std::string>() + "'");
        open.push_back(s);
    }
    return StationConfiguration::from_open_set(inst, open);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace chargeplan
