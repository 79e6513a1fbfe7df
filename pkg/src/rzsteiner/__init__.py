"""Exact primal-dual Steiner tree approximation with desk-scale oracles."""
from .graph import (DisconnectedError, DisjointSets, GuardError, Instance, InstanceError,
                    induced_subgraph, kruskal, metric_closure, quasi_bipartite_b,
                    steiner_neighborhoods)
from .components import ComponentCatalog, FullComponent, build_catalog, component_loss, min_full_component
from .instances import (GeneratorSpec, InfeasibleSpecError, StpSyntaxError, generate,
                        generate_fig3, generate_path, generate_random_bquasi, generate_skutella,
                        generate_star, generate_triangle, parse_stp, write_stp)
from .mstdual import (CollectionState, DualTimeline, Partition, add_component, bottleneck_matrix,
                      collection_state, dual_load, dual_load_bottleneck, initial_state, is_violated,
                      kruskal_dual, rank_contribution, selection_value, steiner_rank)
