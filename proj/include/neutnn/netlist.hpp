#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "neutnn/model_doc.hpp"

namespace neutnn {

/// Stats block accompanying an emitted netlist.
struct NetlistStats {
    std::map<std::string, long long> instances;  // per module kind
    long long total_synapses = 0;
};

/// Lowers a validated model into a line-oriented hierarchical structural
/// netlist (LF line endings, canonical instance order and naming
/// L<i>.P<col>.N<n>.D<d>.S<s>.Y<syn>). Byte-deterministic for identical
/// inputs. Under RemoveZero, pruned synapses are not instantiated; under
/// KeepZero every synapse carries its initial weight and pruned flag.
NetlistStats emit_netlist(const ModelDoc& doc, std::ostream& out);

std::string emit_netlist_string(const ModelDoc& doc);

/// Reconstructs the model document from a netlist. Exact inverse of
/// emit_netlist for KeepZero netlists.
ModelDoc parse_netlist(const std::string& text);

}  // namespace neutnn
