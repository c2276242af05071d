#pragma once

#include <string>

#include "qcap/channels.hpp"

// Channel files: {"name": str, "dim_in": int, "dim_out": int,
// "kraus": [ operator, ... ]} where each operator is a row-major list of rows
// and every entry is a [re, im] pair.
namespace qcap::io {

/// Parses a channel document; malformed input or a trace-preservation
/// violation throws ChannelError.
QuantumChannel channel_from_json(const std::string& text);
QuantumChannel load_channel_file(const std::string& path);

std::string channel_to_json(const QuantumChannel& ch);

/// Shortest decimal form with 12 significant digits ('.' separator).
std::string format_number(double v);

}  // namespace qcap::io
