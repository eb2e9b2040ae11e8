import type { InstanceDoc } from './types';

// Three clusters, six servers, two software types. Small enough to solve
// instantly, big enough that protection and placement choices matter.
export const SAMPLE_INSTANCE: InstanceDoc = {
  clusters: [
    { name: 'metro-a', availability: 0.9995 },
    { name: 'metro-b', availability: 0.9999 },
    { name: 'regional', availability: 0.99995 },
  ],
  servers: [
    { name: 'ma-01', cluster: 'metro-a', capacity: 24, availability: 0.9995 },
    { name: 'ma-02', cluster: 'metro-a', capacity: 20, availability: 0.9999 },
    { name: 'mb-01', cluster: 'metro-b', capacity: 24, availability: 0.9995 },
    { name: 'mb-02', cluster: 'metro-b', capacity: 16, availability: 0.99995 },
    { name: 'rg-01', cluster: 'regional', capacity: 32, availability: 0.9999 },
    { name: 'rg-02', cluster: 'regional', capacity: 24, availability: 0.9995 },
  ],
  vnf_types: [
    { name: 'firewall', availability: 0.9999 },
    { name: 'gateway', availability: 0.99995 },
  ],
  access_points: [{ name: 'pop-north' }, { name: 'pop-south' }, { name: 'pop-east' }],
  access_links: [
    { cluster: 'metro-a', access_point: 'pop-north', availability: 0.9999 },
    { cluster: 'metro-a', access_point: 'pop-south', availability: 0.9995 },
    { cluster: 'metro-a', access_point: 'pop-east', availability: 0.9999 },
    { cluster: 'metro-b', access_point: 'pop-north', availability: 0.9995 },
    { cluster: 'metro-b', access_point: 'pop-south', availability: 0.9999 },
    { cluster: 'metro-b', access_point: 'pop-east', availability: 0.9999 },
    { cluster: 'regional', access_point: 'pop-north', availability: 0.9999 },
    { cluster: 'regional', access_point: 'pop-south', availability: 0.9999 },
    { cluster: 'regional', access_point: 'pop-east', availability: 0.99995 },
  ],
  sync_links: [
    { cluster_a: 'metro-a', cluster_b: 'metro-b', availability: 0.999 },
    { cluster_a: 'metro-a', cluster_b: 'regional', availability: 0.999 },
    { cluster_a: 'metro-b', cluster_b: 'regional', availability: 0.9995 },
  ],
  requests: [
    { name: 'tenant-alpha', vnf: 'firewall', access_points: ['pop-north', 'pop-south'], demand: 8 },
    { name: 'tenant-beta', vnf: 'firewall', access_points: ['pop-north'], demand: 6 },
    { name: 'tenant-gamma', vnf: 'gateway', access_points: ['pop-south', 'pop-east'], demand: 10 },
    { name: 'tenant-delta', vnf: 'gateway', access_points: ['pop-east'], demand: 5 },
    { name: 'tenant-epsilon', vnf: 'firewall', access_points: ['pop-south', 'pop-east'], demand: 7 },
    { name: 'tenant-zeta', vnf: 'gateway', access_points: ['pop-north', 'pop-east'], demand: 9 },
  ],
};
