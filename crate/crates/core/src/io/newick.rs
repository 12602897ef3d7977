use crate::hcluster::Dendrogram;

fn quote(label: &str) -> String {
    if label.chars().any(|c| "()[]':;, \t\n".contains(c)) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Newick text with branch lengths equal to differences of merge levels.
pub fn to_newick(dend: &Dendrogram) -> String {
    let p = dend.n_leaves();
    let levels = dend.levels();
    let level = |node: usize| if node < p { 0.0 } else { levels[node - p] };
    let mut text: Vec<String> = dend.labels().iter().map(|l| quote(l)).collect();
    for (t, m) in dend.merges().iter().enumerate() {
        let h = levels[t];
        let s = format!(
            "({}:{},{}:{})",
            text[m.left],
            h - level(m.left),
            text[m.right],
            h - level(m.right)
        );
        text.push(s);
    }
    format!("{};", text[dend.root()])
}
