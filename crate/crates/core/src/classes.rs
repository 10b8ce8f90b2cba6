//! Conjugacy classes.

use crate::group::FiniteGroup;

/// Conjugacy classes ordered by smallest member; class 0 is `{e}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClasses {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn new(group: &FiniteGroup) -> Self {
        let n = group.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for a in group.elements() {
            if class_of[a] != usize::MAX {
                continue;
            }
            let idx = classes.len();
            let mut members: Vec<usize> = group.elements().map(|g| group.conjugate(g, a)).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = idx;
            }
            classes.push(members);
        }
        Self { classes, class_of }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, i: usize) -> &[usize] {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn representative(&self, i: usize) -> usize {
        self.classes[i][0]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::preset;

    #[test]
    fn quaternion_class_sizes() {
        let cc = ConjugacyClasses::new(&preset("Q8").unwrap());
        let mut sizes = cc.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
    }

    #[test]
    fn s3_has_three_classes() {
        let cc = ConjugacyClasses::new(&preset("D6").unwrap());
        assert_eq!(cc.len(), 3);
        assert_eq!(cc.class(0), &[0]);
    }

    #[test]
    fn abelian_classes_are_singletons() {
        let g = preset("Z4xZ2").unwrap();
        let cc = ConjugacyClasses::new(&g);
        assert_eq!(cc.len(), 8);
        for a in g.elements() {
            assert_eq!(cc.class(cc.class_of(a)), &[a]);
        }
    }
}
