#pragma once

#include "eamine/catalogue.hpp"
#include "eamine/model.hpp"
#include "eamine/store.hpp"
#include "eamine/tables.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace eamine {

struct MapResult {
  GenericModel model;
  /// Observations no rule applied to (flows and process events are consumed
  /// later and are not listed here).
  std::vector<std::string> unmapped;
};

/// Static 1-to-1 rule table:
///   host          -> Node (key mac:<mac> else ip:<ip>)
///   port          -> ApplicationInterface (ip:port/proto), assigned from its
///                    Node, plus ITService <name>@<ip> serving it when the
///                    port is in the well-known table
///   snmp account  -> BusinessActor (account:<name>), associated with the
///                    agent Node
///   snmp sys_name -> renames the agent Node; sys_descr is recorded on it
/// Attribute conflicts go to the first writer in store order, i.e. the more
/// authoritative source.
MapResult map_observations(const ObservationStore &store, const Catalogue &cat,
                           const PortTable &ports);

/// Natural key of the Node an address-bearing observation belongs to.
std::string node_key(std::string_view mac, std::string_view ip);

/// Applies a manual enrichment document:
///
///   { "format": "eamine-enrichment", "version": 1,
///     "elements":  [ {"key", "kind", "name", "attrs"?} ],
///     "relations": [ {"kind", "source", "target"} ],
///     "overrides": [ {"elem_id", "name"?, "attrs"?} ] }
///
/// Relation endpoints are existing elem_ids, "<Kind>/<natural key>" of an
/// existing element, or keys of elements declared in the same document. All-or-nothing: any bad entry throws and the input model
/// is returned untouched. Whitespace-only documents are a no-op.
GenericModel apply_manual_enrichment(const GenericModel &model, std::string_view doc,
                                     const Catalogue &cat);

} // namespace eamine
