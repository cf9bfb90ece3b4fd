jobs = ['a', 'b', 'c']
done = []
while jobs:
    job = jobs.pop(0)
    done.append(job)
print(done)
print(not jobs)
