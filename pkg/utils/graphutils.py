import networkx as nx

from utils.hilbertutils import label_sort_key


def unbiasedness_graph(labels, verdicts) -> nx.Graph:
    """
    Builds the graph whose nodes are basis labels and whose edges join every pair
    found mutually unbiased.

    Args:
        labels: All basis labels taking part.
        verdicts: Iterable of (label_a, label_b, unbiased) triples.

    Returns:
        An undirected graph; a family is mutually unbiased iff the graph is complete.
    """
    G = nx.Graph()
    for label in labels:
        G.add_node(label)
    for a, b, unbiased in verdicts:
        if unbiased:
            G.add_edge(a, b)
    return G


def is_complete_family(G: nx.Graph) -> bool:
    n = G.number_of_nodes()
    return G.number_of_edges() == n * (n - 1) // 2


def largest_unbiased_family(G: nx.Graph) -> list:
    '''
    Largest set of pairwise unbiased bases (a maximum clique), labels in canonical order.
    Ties are broken by the canonical order of the sorted labels.
    '''
    if G.number_of_nodes() == 0:
        return []
    cliques = [sorted(c, key=label_sort_key) for c in nx.find_cliques(G)]
    best = max(len(c) for c in cliques)
    candidates = sorted((c for c in cliques if len(c) == best),
                        key=lambda c: [label_sort_key(x) for x in c])
    return candidates[0]
