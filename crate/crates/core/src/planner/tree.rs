//! The configuration tree and its mirror of locomotion parameters. Each node
//! carries both, so a single structure realizes the paired trees.

use serde::{Deserialize, Serialize};

use crate::geom::{Config, Pose2};
use crate::lipm::{LocomotionParams, StanceState};
use crate::propagation::Branch;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node<T> {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub config: Config<T>,
    /// Locomotion parameters of the step arriving at this node, expressed in
    /// the parent's local frame; the root's are in the global frame.
    pub loco: LocomotionParams<T>,
    /// Cumulative walking time from the root.
    pub arrival_time: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Real> Tree<T> {
    /// A tree rooted at the start configuration with its seed locomotion
    /// state (global frame, arrival time zero).
    pub fn new(start: Config<T>, seed: LocomotionParams<T>) -> Self {
        Self {
            nodes: vec![Node {
                id: NodeId(0),
                parent: None,
                config: start,
                loco: seed,
                arrival_time: T::zero(),
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node<T> {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn root(&self) -> &Node<T> {
        &self.nodes[0]
    }

    /// The frame the node's locomotion parameters are expressed in: the
    /// parent's pose, or the identity for the root.
    pub fn parent_pose(&self, id: NodeId) -> Pose2<T> {
        match self.node(id).parent {
            Some(pid) => Pose2::from_config(&self.node(pid).config),
            None => Pose2::identity(),
        }
    }

    /// The node's stance state re-expressed in its own local frame, ready to
    /// seed propagation of a branch growing from it.
    pub fn stance_in_own_frame(&self, id: NodeId) -> StanceState<T> {
        let node = self.node(id);
        let own = Pose2::from_config(&node.config);
        node.loco
            .stance()
            .to_global(&self.parent_pose(id))
            .to_local(&own)
    }

    /// Append a collision-pruned branch below `parent`. Returns the ids of
    /// the appended nodes (empty branch leaves the tree unchanged).
    pub fn extend(&mut self, parent: NodeId, branch: &Branch<T>) -> Vec<NodeId> {
        debug_assert!(parent.0 < self.nodes.len());
        let mut ids = Vec::with_capacity(branch.len());
        let mut prev = parent;
        for ((config, loco), &arrival) in branch
            .configs
            .iter()
            .zip(&branch.params)
            .zip(&branch.arrival_times)
        {
            let id = NodeId(self.nodes.len());
            debug_assert!(arrival > self.node(prev).arrival_time);
            self.nodes.push(Node {
                id,
                parent: Some(prev),
                config: *config,
                loco: *loco,
                arrival_time: arrival,
            });
            ids.push(id);
            prev = id;
        }
        ids
    }

    /// Root-to-node path of ids.
    pub fn path_to_root(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cursor = id;
        while let Some(parent) = self.node(cursor).parent {
            path.push(parent);
            cursor = parent;
        }
        path.reverse();
        path
    }
}
