#pragma once

// JSON forms of the session types. Used by the manifest file, the NDJSON
// event files and the wire protocol, so field names here are a public format.

#include "deskmon/session/types.hpp"

#include <json.hpp>

namespace deskmon {

using Json = nlohmann::json;

/// Raised when a JSON document does not match the expected shape.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void to_json(Json& j, const Demographics& v);
void from_json(const Json& j, Demographics& v);
void to_json(Json& j, const ContextSnapshot& v);
void from_json(const Json& j, ContextSnapshot& v);
void to_json(Json& j, const KeyEvent& v);
void from_json(const Json& j, KeyEvent& v);
void to_json(Json& j, const MouseEvent& v);
void from_json(const Json& j, MouseEvent& v);
void to_json(Json& j, const EEGSample& v);
void from_json(const Json& j, EEGSample& v);
void to_json(Json& j, const WearableSample& v);
void from_json(const Json& j, WearableSample& v);
void to_json(Json& j, const HeadPoseSample& v);
void from_json(const Json& j, HeadPoseSample& v);
void to_json(Json& j, const FaceSample& v);
void from_json(const Json& j, FaceSample& v);
void to_json(Json& j, const ContextRecord& v);
void from_json(const Json& j, ContextRecord& v);
void to_json(Json& j, const StreamDescriptor& v);
void from_json(const Json& j, StreamDescriptor& v);
void to_json(Json& j, const TaskRecord& v);
void from_json(const Json& j, TaskRecord& v);
void to_json(Json& j, const AnomalyLabel& v);
void from_json(const Json& j, AnomalyLabel& v);
void to_json(Json& j, const Identity& v);
void from_json(const Json& j, Identity& v);

Json series_to_json(const SampleSeries& series);
/// `type_name` is one of the names returned by sample_type_name().
SampleSeries series_from_json(std::string_view type_name, const Json& samples);

/// Serializes the manifest. Sample payloads are embedded only when requested.
Json manifest_to_json(const SessionManifest& m, bool include_samples);
/// Inverse of manifest_to_json. Streams without an embedded "samples" array get
/// an empty series of the type implied by their kind.
SessionManifest manifest_from_json(const Json& j);

/// Wraps nlohmann exceptions raised while reading `j` into SchemaError.
template <class T>
T parse_as(const Json& j, std::string_view what)
{
    try {
        return j.get<T>();
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
    }
}

}  // namespace deskmon
