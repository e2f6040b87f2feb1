//! Capture avoidance at binder crossings.

use std::collections::BTreeSet;

use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Space {
    Value,
    Modal,
    Cont,
}

pub(crate) fn mentions(fv: &FreeVars, space: Space, name: &str) -> bool {
    match space {
        Space::Value => fv.values.contains(name),
        Space::Modal => fv.modals.contains(name),
        Space::Cont => fv.conts.contains(name),
    }
}

/// A name for binder `b` that clashes with nothing free in the payload
/// (`fv`) and nothing occurring in the binder's scopes.
pub(crate) fn fresh_binder(b: &str, fv: &FreeVars, scopes: &[&dyn Names]) -> Name {
    let mut avoid: BTreeSet<Name> = BTreeSet::new();
    avoid.extend(fv.values.iter().cloned());
    avoid.extend(fv.modals.iter().cloned());
    avoid.extend(fv.conts.iter().cloned());
    avoid.extend(fv.ops.iter().cloned());
    for scope in scopes {
        scope.collect_names(&mut avoid);
    }
    avoid.insert(b.to_string());
    let trimmed = b.trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if trimmed.is_empty() { b } else { trimmed };
    fresh_name(base, &avoid)
}

pub(crate) fn rename<T: Rename>(t: &T, space: Space, old: &str, new: &str) -> T {
    match space {
        Space::Value => t.rename_value(old, new),
        Space::Modal => t.rename_modal(old, new),
        Space::Cont => t.rename_cont(old, new),
    }
}

/// Moves binder `b` of `space` out of the way of the payload variables
/// `fv`, renaming it in its single scope if it would capture one of them.
pub(crate) fn guard<T: Rename + Names + Clone>(space: Space, b: &Name, scope: &T, fv: &FreeVars) -> (Name, T) {
    if mentions(fv, space, b) {
        let new = fresh_binder(b, fv, &[scope]);
        let renamed = rename(scope, space, b, &new);
        (new, renamed)
    } else {
        (b.clone(), scope.clone())
    }
}

/// Like [`guard`] for a fix definition: the function name scopes over the
/// body and `scope`, the parameter over the body only.
pub(crate) fn guard_fix<T: Rename + Names + Clone>(def: &FixDef, scope: &T, fv: &FreeVars) -> (FixDef, T) {
    let mut def = def.clone();
    let mut scope = scope.clone();
    if mentions(fv, Space::Value, &def.name) {
        let new = fresh_binder(&def.name, fv, &[&def.body, &scope, &Expr::var(def.param.clone())]);
        if def.param != def.name {
            def.body = def.body.rename_value(&def.name, &new);
        }
        scope = scope.rename_value(&def.name, &new);
        def.name = new;
    }
    if mentions(fv, Space::Value, &def.param) {
        let new = fresh_binder(&def.param, fv, &[&def.body, &Expr::var(def.name.clone())]);
        def.body = def.body.rename_value(&def.param, &new);
        def.param = new;
    }
    (def, scope)
}

/// Renames the clause parameters of an operation clause that would capture
/// a payload variable.
pub(crate) fn guard_op_clause(clause: &OpClause, fv: &FreeVars) -> OpClause {
    let mut clause = clause.clone();
    for (space, which) in [(Space::Value, 0), (Space::Value, 1), (Space::Cont, 2)] {
        let b = match which {
            0 => clause.x.clone(),
            1 => clause.z.clone(),
            _ => clause.k.clone(),
        };
        if !mentions(fv, space, &b) {
            continue;
        }
        let others = [clause.x.clone(), clause.z.clone(), clause.k.clone()];
        let placeholder = Expr::List(others.iter().map(|n| Expr::var(n.clone())).collect());
        let new = fresh_binder(&b, fv, &[&clause.body, &placeholder]);
        // A repeated parameter name binds innermost: z shadows x.
        let shadowed = which == 0 && clause.z == clause.x;
        if !shadowed {
            clause.body = rename(&clause.body, space, &b, &new);
        }
        match which {
            0 => clause.x = new,
            1 => clause.z = new,
            _ => clause.k = new,
        }
    }
    clause
}

pub(crate) fn guard_ret_clause(clause: &RetClause, fv: &FreeVars) -> RetClause {
    let mut clause = clause.clone();
    if mentions(fv, Space::Value, &clause.x) {
        let new = fresh_binder(&clause.x, fv, &[&clause.body, &Expr::var(clause.z.clone())]);
        if clause.z != clause.x {
            clause.body = clause.body.rename_value(&clause.x, &new);
        }
        clause.x = new;
    }
    if mentions(fv, Space::Value, &clause.z) {
        let new = fresh_binder(&clause.z, fv, &[&clause.body, &Expr::var(clause.x.clone())]);
        clause.body = clause.body.rename_value(&clause.z, &new);
        clause.z = new;
    }
    clause
}
