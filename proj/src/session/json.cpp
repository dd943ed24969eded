#include "deskmon/session/json.hpp"

namespace deskmon {
namespace {

template <class E>
E enum_field(const Json& j, const char* key)
{
    return parse_enum<E>(j.at(key).get<std::string>());
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

std::optional<double> optional_number(const Json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

Json vec3_to_json(const Vec3& v)
{
    return Json::array({v.x, v.y, v.z});
}

Vec3 vec3_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 3) throw SchemaError("expected a 3-element array");
    return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <class Sample>
Json samples_to_json(const std::vector<Sample>& samples)
{
    Json out = Json::array();
    for (const auto& s : samples) out.push_back(Json(s));
    return out;
}

template <class Sample>
std::vector<Sample> samples_from_json(const Json& arr)
{
    if (!arr.is_array()) throw SchemaError("samples must be an array");
    std::vector<Sample> out;
    out.reserve(arr.size());
    for (const auto& j : arr) out.push_back(j.get<Sample>());
    return out;
}

}  // namespace

void to_json(Json& j, const Demographics& v)
{
    j = Json{{"age", v.age}, {"gender", v.gender}, {"handedness", to_string(v.handedness)}};
}

void from_json(const Json& j, Demographics& v)
{
    v.age = j.at("age").get<int>();
    v.gender = j.at("gender").get<std::string>();
    v.handedness = enum_field<Handedness>(j, "handedness");
}

void to_json(Json& j, const ContextSnapshot& v)
{
    Json per_task = Json::array();
    for (const auto& t : v.per_task_time) per_task.push_back({{"task_id", t.task_id}, {"seconds", t.seconds}});
    Json answers = Json::array();
    for (const auto& a : v.answers) answers.push_back({{"task_id", a.task_id}, {"text", a.text}});
    j = Json{{"computer_name", v.computer_name},
             {"private_ip", v.private_ip},
             {"public_ip", v.public_ip},
             {"mac", v.mac},
             {"os", v.os},
             {"architecture", v.architecture},
             {"keyboard_language", v.keyboard_language},
             {"screen_resolution", {{"width", v.screen_resolution.width}, {"height", v.screen_resolution.height}}},
             {"free_memory", v.free_memory},
             {"main_memory", v.main_memory},
             {"start_time", v.start_time},
             {"finish_time", v.finish_time},
             {"per_task_time", per_task},
             {"answers", answers}};
}

void from_json(const Json& j, ContextSnapshot& v)
{
    v.computer_name = j.at("computer_name").get<std::string>();
    v.private_ip = j.at("private_ip").get<std::string>();
    v.public_ip = j.at("public_ip").get<std::string>();
    v.mac = j.at("mac").get<std::string>();
    v.os = j.at("os").get<std::string>();
    v.architecture = j.at("architecture").get<std::string>();
    v.keyboard_language = j.at("keyboard_language").get<std::string>();
    v.screen_resolution.width = j.at("screen_resolution").at("width").get<int>();
    v.screen_resolution.height = j.at("screen_resolution").at("height").get<int>();
    v.free_memory = j.at("free_memory").get<std::uint64_t>();
    v.main_memory = j.at("main_memory").get<std::uint64_t>();
    v.start_time = j.at("start_time").get<std::int64_t>();
    v.finish_time = j.at("finish_time").get<std::int64_t>();
    v.per_task_time.clear();
    for (const auto& t : j.at("per_task_time")) {
        v.per_task_time.push_back({t.at("task_id").get<std::string>(), t.at("seconds").get<double>()});
    }
    v.answers.clear();
    for (const auto& a : j.at("answers")) {
        v.answers.push_back({a.at("task_id").get<std::string>(), a.at("text").get<std::string>()});
    }
}

void to_json(Json& j, const KeyEvent& v)
{
    j = Json{{"raw_ts", v.raw_ts.micros}, {"key_code", v.key_code}, {"action", to_string(v.action)}};
}

void from_json(const Json& j, KeyEvent& v)
{
    v.raw_ts.micros = j.at("raw_ts").get<std::int64_t>();
    v.key_code = j.at("key_code").get<std::string>();
    v.action = enum_field<KeyAction>(j, "action");
}

void to_json(Json& j, const MouseEvent& v)
{
    j = Json{{"raw_ts", v.raw_ts.micros}, {"kind", to_string(v.kind)}, {"x", v.x}, {"y", v.y},
             {"button", to_string(v.button)}, {"wheel_delta", v.wheel_delta}};
}

void from_json(const Json& j, MouseEvent& v)
{
    v.raw_ts.micros = j.at("raw_ts").get<std::int64_t>();
    v.kind = enum_field<MouseKind>(j, "kind");
    v.x = j.at("x").get<int>();
    v.y = j.at("y").get<int>();
    v.button = enum_field<MouseButton>(j, "button");
    v.wheel_delta = j.at("wheel_delta").get<int>();
}

void to_json(Json& j, const EEGSample& v)
{
    j = Json{{"raw_ts", v.raw_ts.micros},
             {"band_power", v.band_power},
             {"attention", v.attention},
             {"meditation", v.meditation},
             {"blink_strength", optional_number(v.blink_strength)}};
}

void from_json(const Json& j, EEGSample& v)
{
    v.raw_ts.micros = j.at("raw_ts").get<std::int64_t>();
    const auto& bands = j.at("band_power");
    if (!bands.is_array() || bands.size() != 5) throw SchemaError("band_power must have exactly 5 entries");
    for (std::size_t i = 0; i < 5; ++i) v.band_power[i] = bands[i].get<double>();
    v.attention = j.at("attention").get<double>();
    v.meditation = j.at("meditation").get<double>();
    v.blink_strength = optional_number(j, "blink_strength");
}

void to_json(Json& j, const WearableSample& v)
{
    j = Json{{"raw_ts", v.raw_ts.micros},
             {"heart_rate_bpm", optional_number(v.heart_rate_bpm)},
             {"accel", vec3_to_json(v.accel)},
             {"gyro", vec3_to_json(v.gyro)},
             {"mag", vec3_to_json(v.mag)}};
}

void from_json(const Json& j, WearableSample& v)
{
    v.raw_ts.micros = j.at("raw_ts").get<std::int64_t>();
    v.heart_rate_bpm = optional_number(j, "heart_rate_bpm");
    v.accel = vec3_from_json(j.at("accel"));
    v.gyro = vec3_from_json(j.at("gyro"));
    v.mag = vec3_from_json(j.at("mag"));
}

void to_json(Json& j, const HeadPoseSample& v)
{
    j = Json{{"raw_ts", v.raw_ts.micros}, {"pitch", v.pitch}, {"roll", v.roll}, {"yaw", v.yaw}};
}

void from_json(const Json& j, HeadPoseSample& v)
{
    v.raw_ts.micros = j.at("raw_ts").get<std::int64_t>();
    v.pitch = j.at("pitch").get<double>();
    v.roll = j.at("roll").get<double>();
    v.yaw = j.at("yaw").get<double>();
}

void to_json(Json& j, const FaceSample& v)
{
    j = Json{{"raw_ts", v.raw_ts.micros}, {"face_size_px", v.face_size_px}, {"auth_score", v.auth_score},
             {"face_present", v.face_present}};
}

void from_json(const Json& j, FaceSample& v)
{
    v.raw_ts.micros = j.at("raw_ts").get<std::int64_t>();
    v.face_size_px = j.at("face_size_px").get<double>();
    v.auth_score = j.at("auth_score").get<double>();
    v.face_present = j.at("face_present").get<bool>();
}

void to_json(Json& j, const ContextRecord& v)
{
    j = Json{{"raw_ts", v.raw_ts.micros}, {"snapshot", v.snapshot}};
}

void from_json(const Json& j, ContextRecord& v)
{
    v.raw_ts.micros = j.at("raw_ts").get<std::int64_t>();
    v.snapshot = j.at("snapshot").get<ContextSnapshot>();
}

void to_json(Json& j, const StreamDescriptor& v)
{
    j = Json{{"stream_id", v.stream_id},
             {"kind", to_string(v.kind)},
             {"nominal_rate_hz", optional_number(v.nominal_rate_hz)},
             {"payload", to_string(v.payload)},
             {"clock_offset_micros", v.clock_offset_micros},
             {"clock_drift_ppm", v.clock_drift_ppm},
             {"clock_reference_raw_micros", v.clock_reference_raw_micros}};
    if (v.media_file) j["media_file"] = *v.media_file;
}

void from_json(const Json& j, StreamDescriptor& v)
{
    v.stream_id = j.at("stream_id").get<std::string>();
    v.kind = enum_field<StreamKind>(j, "kind");
    v.nominal_rate_hz = optional_number(j, "nominal_rate_hz");
    v.payload = enum_field<PayloadKind>(j, "payload");
    v.clock_offset_micros = j.value("clock_offset_micros", std::int64_t{0});
    v.clock_drift_ppm = j.value("clock_drift_ppm", 0.0);
    v.clock_reference_raw_micros = j.value("clock_reference_raw_micros", std::int64_t{0});
    v.media_file.reset();
    if (auto it = j.find("media_file"); it != j.end() && !it->is_null()) v.media_file = it->get<std::string>();
}

void to_json(Json& j, const TaskRecord& v)
{
    j = Json{{"task_id", v.task_id},
             {"group", to_string(v.group)},
             {"start", v.start.micros},
             {"end", v.end.micros},
             {"accuracy", v.accuracy},
             {"duration_s", v.duration_s}};
}

void from_json(const Json& j, TaskRecord& v)
{
    v.task_id = j.at("task_id").get<std::string>();
    v.group = enum_field<TaskGroup>(j, "group");
    v.start.micros = j.at("start").get<std::int64_t>();
    v.end.micros = j.at("end").get<std::int64_t>();
    v.accuracy = j.at("accuracy").get<double>();
    v.duration_s = j.at("duration_s").get<double>();
}

void to_json(Json& j, const AnomalyLabel& v)
{
    j = Json{{"start", v.start.micros}, {"end", v.end.micros}, {"kind", to_string(v.kind)}};
}

void from_json(const Json& j, AnomalyLabel& v)
{
    v.start.micros = j.at("start").get<std::int64_t>();
    v.end.micros = j.at("end").get<std::int64_t>();
    v.kind = enum_field<AnomalyKind>(j, "kind");
}

void to_json(Json& j, const Identity& v)
{
    j = Json{{"name", v.name}, {"email", v.email}, {"id_number", v.id_number}};
}

void from_json(const Json& j, Identity& v)
{
    v.name = j.value("name", std::string{});
    v.email = j.value("email", std::string{});
    v.id_number = j.value("id_number", std::string{});
}

Json series_to_json(const SampleSeries& series)
{
    return std::visit(
        [](const auto& v) -> Json {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
                return Json::array();
            } else {
                return samples_to_json(v);
            }
        },
        series);
}

SampleSeries series_from_json(std::string_view type_name, const Json& samples)
{
    try {
        if (type_name == "key") return samples_from_json<KeyEvent>(samples);
        if (type_name == "mouse") return samples_from_json<MouseEvent>(samples);
        if (type_name == "eeg") return samples_from_json<EEGSample>(samples);
        if (type_name == "wearable") return samples_from_json<WearableSample>(samples);
        if (type_name == "head_pose") return samples_from_json<HeadPoseSample>(samples);
        if (type_name == "face") return samples_from_json<FaceSample>(samples);
        if (type_name == "context") return samples_from_json<ContextRecord>(samples);
        if (type_name == "none") return std::monostate{};
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string("malformed ") + std::string(type_name) + " sample: " + e.what());
    }
    throw SchemaError("unknown sample type '" + std::string(type_name) + "'");
}

Json manifest_to_json(const SessionManifest& m, bool include_samples)
{
    Json streams = Json::array();
    for (const auto& s : m.streams) {
        Json js = s.descriptor;
        if (include_samples && s.descriptor.payload == PayloadKind::inline_samples) {
            js["sample_type"] = sample_type_name(s.samples);
            js["samples"] = series_to_json(s.samples);
        }
        streams.push_back(std::move(js));
    }
    Json j{{"format", "deskmon-session"},
           {"format_version", 1},
           {"session_id", m.session_id},
           {"user_id", m.user_id ? Json(*m.user_id) : Json(nullptr)},
           {"demographics", m.demographics},
           {"context", m.context},
           {"eeg_band_labels", m.eeg_band_labels},
           {"streams", streams},
           {"tasks", m.tasks},
           {"anomaly_labels", m.anomaly_labels},
           {"cheater_flag", m.cheater_flag}};
    if (m.identity) j["identity"] = *m.identity;
    return j;
}

SessionManifest manifest_from_json(const Json& j)
{
    try {
        if (!j.is_object()) throw SchemaError("manifest must be a JSON object");
        SessionManifest m;
        m.session_id = j.at("session_id").get<std::string>();
        if (const auto& uid = j.at("user_id"); !uid.is_null()) m.user_id = uid.get<std::uint64_t>();
        if (auto it = j.find("identity"); it != j.end() && !it->is_null()) m.identity = it->get<Identity>();
        m.demographics = j.at("demographics").get<Demographics>();
        m.context = j.at("context").get<ContextSnapshot>();
        const auto& labels = j.at("eeg_band_labels");
        if (!labels.is_array() || labels.size() != 5) throw SchemaError("eeg_band_labels must have 5 entries");
        for (std::size_t i = 0; i < 5; ++i) m.eeg_band_labels[i] = labels[i].get<std::string>();
        for (const auto& js : j.at("streams")) {
            Stream s;
            s.descriptor = js.get<StreamDescriptor>();
            if (auto it = js.find("samples"); it != js.end()) {
                s.samples = series_from_json(js.at("sample_type").get<std::string>(), *it);
            } else {
                s.samples = empty_series_for(s.descriptor.kind);
            }
            if (s.descriptor.payload == PayloadKind::external_file) s.samples = std::monostate{};
            m.streams.push_back(std::move(s));
        }
        m.tasks = j.at("tasks").get<std::vector<TaskRecord>>();
        m.anomaly_labels = j.at("anomaly_labels").get<std::vector<AnomalyLabel>>();
        m.cheater_flag = j.at("cheater_flag").get<bool>();
        return m;
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string("manifest schema violation: ") + e.what());
    }
}

}  // namespace deskmon
